"""Single-step block renormalization of the transverse-field Ising chain.

Blocks are pairs of adjacent sites (2i-1, 2i). Each block keeps the two
degenerate lowest eigenstates of its intrablock Hamiltonian
-J_{2i-1} sz sz - Gamma_{2i-1} sx_{first}; the interblock terms then produce
an Ising chain of half the size with rescaled couplings plus a constant
energy shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .embedding import DegenerateBlockError, EmbeddingMap
from .models import IsingCouplings


@dataclass(frozen=True)
class BlockEigen:
    """Eigensystem of one two-site block."""

    epsilon: float  # magnitude of the block eigenvalues, +-epsilon twice each
    a_plus: float
    a_minus: float


def block_eigensystem(J: float, Gamma: float) -> BlockEigen:
    """Kept-state amplitudes of the block with intra couplings (J, Gamma).

    The two kept states are a+|uu> + a-|du> and a+|dd> + a-|ud|, both with
    energy -sqrt(J^2 + Gamma^2); the printed closed form for a+- is used
    with the square root restored in the denominator, which is what the
    2x2 eigenvector equation requires.
    """
    if J == 0.0 and Gamma == 0.0:
        raise DegenerateBlockError(
            "block with (J, Gamma) = (0, 0): truncation undefined"
        )
    eps = sqrt(J * J + Gamma * Gamma)
    if J >= 0.0:
        a_plus = sqrt(0.5 * (1.0 + J / eps))
        # equivalent to sqrt((1 - J/eps)/2) but immune to cancellation
        a_minus = abs(Gamma) / sqrt(2.0 * eps * (eps + J))
    else:
        a_minus = sqrt(0.5 * (1.0 - J / eps))
        a_plus = abs(Gamma) / sqrt(2.0 * eps * (eps - J))
    return BlockEigen(eps, a_plus, a_minus)


def _block_isometry(eig: BlockEigen) -> np.ndarray:
    """4x2 isometry, rows ordered |uu>, |ud>, |du>, |dd> (first site = MSB)."""
    v = np.zeros((4, 2), dtype=complex)
    v[0, 0] = eig.a_plus   # <uu|1>
    v[2, 0] = eig.a_minus  # <du|1>
    v[3, 1] = eig.a_plus   # <dd|2>
    v[1, 1] = eig.a_minus  # <ud|2>
    return v


def build_embedding_ising(c: IsingCouplings) -> EmbeddingMap:
    """Per-block 4x2 isometries for the two-site blocking of the chain."""
    c.require_blockable()
    mats = []
    for i in range(c.n_spins // 2):
        J, Gamma = c.J[2 * i], c.Gamma[2 * i]
        try:
            eig = block_eigensystem(J, Gamma)
        except DegenerateBlockError as exc:
            raise DegenerateBlockError(f"block {i + 1}: {exc}") from exc
        mats.append(_block_isometry(eig))
    return EmbeddingMap(2, tuple(mats))


@dataclass(frozen=True)
class RGResult:
    """Output of one Ising renormalization step."""

    couplings: IsingCouplings  # N/2 sites
    energy_offset: float       # sum of kept block energies
    embedding: EmbeddingMap


def renormalize_ising(c: IsingCouplings) -> RGResult:
    """Halve the chain: rescaled couplings, energy shift and embedding."""
    n = c.n_spins
    nb = n // 2
    emb = build_embedding_ising(c)
    J_new, G_new = [], []
    offset = 0.0
    for i in range(1, nb + 1):
        # intra couplings of block i and of the next block (wrapping)
        J_intra = c.J[2 * i - 2]
        G_intra = c.Gamma[2 * i - 2]
        J_next = c.J[(2 * i) % n]       # site 2i+1, wrapping N+1 -> 1
        G_next = c.Gamma[(2 * i) % n]
        eps_i = sqrt(J_intra**2 + G_intra**2)
        eps_next = sqrt(J_next**2 + G_next**2)
        J_new.append(c.J[2 * i - 1] * J_next / eps_next)
        G_new.append(G_intra * c.Gamma[2 * i - 1] / eps_i)
        offset -= eps_i
    return RGResult(IsingCouplings(nb, tuple(J_new), tuple(G_new)),
                    offset, emb)
