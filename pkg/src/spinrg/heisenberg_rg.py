"""Single-step block renormalization of the open XXZ chain.

Blocks are triples of adjacent sites. Each block keeps the twofold
degenerate ground doublet of its two-bond block Hamiltonian; the closed
forms for the coarse couplings (J', Delta'), the boundary-spin rescaling
factors and the block energy are evaluated directly, while the doublet
isometry itself is constructed numerically from the 8x8 block matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .core import OperatorSum, PauliTerm, dense_matrix
from .embedding import DegenerateBlockError, EmbeddingMap
from .models import HeisenbergCouplings, build_heisenberg


@dataclass(frozen=True)
class HeisenbergRGFactors:
    """Closed-form quantities of the three-site blocking."""

    x: float
    xi_x: float   # boundary factor for Sx, equals the Sy factor
    xi_z: float
    E_B: float    # kept doublet energy of one block
    J_prime: float
    Delta_prime: float


def rg_factors(J: float, Delta: float) -> HeisenbergRGFactors:
    """Coarse couplings and boundary factors for block parameters (J, Delta)."""
    if J <= 0:
        raise ValueError(f"J must be positive, got {J}")
    if Delta < 0:
        raise ValueError(f"Delta must be >= 0, got {Delta}")
    root = sqrt(Delta * Delta + 8.0)
    x = 2.0 * (Delta - 1.0) / (8.0 + Delta + 3.0 * root)
    denom = 3.0 * (1.0 + 2.0 * x * x)
    xi_x = 2.0 * (1.0 + x) * (1.0 - 2.0 * x) / denom
    xi_z = 2.0 * (1.0 + x) ** 2 / denom
    if abs(xi_x) < 1e-14:
        raise ValueError("xi_x vanishes; coarse chain decouples")
    E_B = -J / 4.0 * (Delta + root)
    J_prime = xi_x * xi_x * J
    Delta_prime = (xi_z / xi_x) ** 2 * Delta
    return HeisenbergRGFactors(x, xi_x, xi_z, E_B, J_prime, Delta_prime)


def _block_hamiltonian(J, Delta):
    """Dense 8x8 Hamiltonian of one three-site block (two bonds)."""
    terms = []
    for j in (1, 2):
        terms.append(PauliTerm(J / 4, ((j, "x"), (j + 1, "x"))))
        terms.append(PauliTerm(J / 4, ((j, "y"), (j + 1, "y"))))
        terms.append(PauliTerm(J * Delta / 4, ((j, "z"), (j + 1, "z"))))
    return dense_matrix(OperatorSum(3, tuple(terms)))


def _block_doublet(J, Delta):
    """8x2 isometry onto the ground doublet, Sz = +1/2 column first.

    The degenerate pair returned by the eigensolver is rotated into
    simultaneous eigenstates of the block total Sz, and each column's
    largest-magnitude amplitude is made real positive.
    """
    h = _block_hamiltonian(J, Delta)
    evals, evecs = np.linalg.eigh(h)
    scale = max(1.0, abs(evals).max())
    if evals[1] - evals[0] > 1e-9 * scale or evals[2] - evals[1] < 1e-9 * scale:
        raise DegenerateBlockError(
            f"unexpected block spectrum: lowest energies {evals[:3]}"
        )
    g = evecs[:, :2]
    # total Sz of three spins is diagonal in the computational basis
    bits = np.arange(8)
    sz = ((bits >> 2 & 1) + (bits >> 1 & 1) + (bits & 1)) * -1.0 + 1.5
    m = g.conj().T @ (sz[:, None] * g)
    mvals, mvecs = np.linalg.eigh((m + m.conj().T) / 2.0)
    g = g @ mvecs
    order = np.argsort(-mvals)  # Sz = +1/2 first
    g = g[:, order]
    k = np.argmax(np.abs(g[:, 0]))
    g[:, 0] /= g[k, 0] / abs(g[k, 0])
    # relative phase of the Sz = -1/2 column: make the edge-spin lowering
    # matrix element <+1/2| Sx_1 |-1/2> real positive so the measured
    # boundary factors carry the sign of the closed forms
    sx1 = dense_matrix(OperatorSum(3, (PauliTerm(0.5, ((1, "x"),)),)))
    cross = g[:, 0].conj() @ sx1 @ g[:, 1]
    if abs(cross) < 1e-14:
        k = np.argmax(np.abs(g[:, 1]))
        cross = g[k, 1]
    g[:, 1] /= cross / abs(cross)
    return g, float(evals[0])


def build_embedding_heisenberg(c: HeisenbergCouplings) -> EmbeddingMap:
    """Per-block 8x2 ground-doublet isometries (identical blocks)."""
    c.require_blockable()
    v, _ = _block_doublet(c.J, c.Delta)
    return EmbeddingMap(3, (v,) * (c.n_spins // 3))


@dataclass(frozen=True)
class HeisenbergRGResult:
    couplings: HeisenbergCouplings  # N/3 sites
    energy_offset: float            # (N/3) * E_B
    embedding: EmbeddingMap
    factors: HeisenbergRGFactors


def renormalize_heisenberg(c: HeisenbergCouplings) -> HeisenbergRGResult:
    """Reduce the chain to a third of its size with rescaled (J', Delta')."""
    c.require_blockable()
    f = rg_factors(c.J, c.Delta)
    emb = build_embedding_heisenberg(c)
    nb = c.n_spins // 3
    return HeisenbergRGResult(
        HeisenbergCouplings(nb, f.J_prime, f.Delta_prime),
        nb * f.E_B, emb, f,
    )


@dataclass(frozen=True)
class BoundaryFactorReport:
    """Measured edge-spin rescaling factors against the closed forms."""

    measured_xi_x: float
    measured_xi_y: float
    measured_xi_z: float
    deviation_x: float
    deviation_y: float
    deviation_z: float

    @property
    def max_deviation(self):
        return max(self.deviation_x, self.deviation_y, self.deviation_z)


def verify_boundary_factors(emb: EmbeddingMap, c: HeisenbergCouplings
                            ) -> BoundaryFactorReport:
    """Project the block-edge spins and compare against xi_x, xi_z.

    Checks V+ S_edge^a V = xi^a * sigma_a/2 for both edge sites of a block,
    for a in {x, y, z}. Report only; nothing is raised on deviation.
    """
    f = rg_factors(c.J, c.Delta)
    v = emb.block_isometries[0]
    measured, deviation = {}, {}
    for axis, xi in (("x", f.xi_x), ("y", f.xi_x), ("z", f.xi_z)):
        devs, vals = [], []
        for pos in (1, 3):  # edge positions within the block
            op = dense_matrix(OperatorSum(3, (PauliTerm(0.5, ((pos, axis),)),)))
            w = v.conj().T @ op @ v
            target = 0.5 * np.array(
                [[1, 0], [0, -1]] if axis == "z"
                else [[0, 1], [1, 0]] if axis == "x"
                else [[0, -1j], [1j, 0]], dtype=complex)
            # measured factor: projection of w onto the target generator
            denom = np.trace(target.conj().T @ target).real
            vals.append(float(np.trace(target.conj().T @ w).real / denom))
            devs.append(float(np.abs(w - xi * target).max()))
        measured[axis] = float(np.mean(vals))
        deviation[axis] = max(devs)
    return BoundaryFactorReport(
        measured["x"], measured["y"], measured["z"],
        deviation["x"], deviation["y"], deviation["z"],
    )


__all__ = [
    "HeisenbergRGFactors", "HeisenbergRGResult", "BoundaryFactorReport",
    "rg_factors", "build_embedding_heisenberg", "renormalize_heisenberg",
    "verify_boundary_factors", "build_heisenberg",
]
