"""Block embedding isometries and the maps they induce on states and operators.

An embedding is a tensor product of per-block isometries V_k of shape
(2^b, 2): two kept states per block of b sites. It sends the coarse chain
(one spin per block) into the original chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OperatorSum, PAULI, PauliTerm, StateVector

ISOMETRY_TOL = 1e-13


class DegenerateBlockError(ValueError):
    """A block's truncation is ill-defined (degenerate kept subspace)."""


class TruncatedToZeroError(ValueError):
    """The state lies entirely in the discarded subspace."""


@dataclass(frozen=True)
class EmbeddingMap:
    """Tensor product of per-block isometries, all of the same block size."""

    block_size: int
    block_isometries: tuple  # of (2^block_size, 2) ndarrays

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.block_isometries)
        object.__setattr__(self, "block_isometries", mats)
        dim = 2**self.block_size
        for k, m in enumerate(mats):
            if m.shape != (dim, 2):
                raise ValueError(
                    f"block {k + 1} isometry has shape {m.shape}, "
                    f"expected ({dim}, 2)"
                )
            dev = np.abs(m.conj().T @ m - np.eye(2)).max()
            if dev > ISOMETRY_TOL:
                raise ValueError(
                    f"block {k + 1} matrix is not an isometry "
                    f"(|V+V - I| = {dev:.2e})"
                )

    @property
    def n_blocks(self):
        return len(self.block_isometries)

    @property
    def n_spins_source(self):
        """Spin count of the original (large) chain."""
        return self.block_size * self.n_blocks

    @property
    def n_spins_target(self):
        """Spin count of the renormalized (small) chain."""
        return self.n_blocks

    def dense(self):
        """Full 2^N x 2^(N/b) matrix of the embedding. Small N only."""
        t = np.ones((1, 1), dtype=complex)
        for m in self.block_isometries:
            t = np.kron(t, m)
        return t


@dataclass(frozen=True)
class TruncatedState:
    """Result of a truncation, with the norm lost to the discarded subspace."""

    state: StateVector
    fidelity: float  # norm of T+ v before any renormalization


def apply_T(emb: EmbeddingMap, v_prime: StateVector) -> StateVector:
    """Embed a coarse-chain state into the original chain: v = T v'."""
    if v_prime.n_spins != emb.n_blocks:
        raise ValueError(
            f"state has {v_prime.n_spins} spins, embedding expects "
            f"{emb.n_blocks}"
        )
    t = v_prime.amplitudes.reshape((2,) * emb.n_blocks)
    for k, m in enumerate(emb.block_isometries):
        t = np.moveaxis(np.tensordot(m, t, axes=(1, k)), 0, k)
    return StateVector(emb.n_spins_source, t.reshape(-1))


def apply_Tdagger(emb: EmbeddingMap, v: StateVector,
                  renormalize: bool = True) -> TruncatedState:
    """Truncate an original-chain state: v' = T+ v.

    The returned fidelity is |T+ v| before rescaling; with ``renormalize``
    the state is scaled back to unit norm.
    """
    if v.n_spins != emb.n_spins_source:
        raise ValueError(
            f"state has {v.n_spins} spins, embedding expects "
            f"{emb.n_spins_source}"
        )
    dim = 2**emb.block_size
    t = v.amplitudes.reshape((dim,) * emb.n_blocks)
    for k, m in enumerate(emb.block_isometries):
        t = np.moveaxis(np.tensordot(m.conj().T, t, axes=(1, k)), 0, k)
    out = StateVector(emb.n_blocks, t.reshape(-1))
    fid = out.norm
    if fid < 1e-14:
        raise TruncatedToZeroError(
            "truncated state vanishes: the initial state has no weight in "
            "the kept subspace"
        )
    if renormalize:
        out = out.normalize()
    return TruncatedState(out, fid)


def _block_local_matrix(factors, block_size):
    """Dense 2^b x 2^b matrix of Pauli factors given by in-block positions."""
    ops = dict(factors)  # position (1-based within block) -> axis
    m = np.ones((1, 1), dtype=complex)
    for p in range(1, block_size + 1):
        m = np.kron(m, PAULI[ops.get(p, "i")])
    return m


def _pauli_components(w):
    """Decompose a Hermitian 2x2 matrix as w0*I + sum_a wa*sigma_a."""
    comps = {}
    for axis in ("i", "x", "y", "z"):
        c = np.trace(PAULI[axis].conj().T @ w).real / 2.0
        if abs(c) > 1e-14:
            comps[axis] = float(c)
    return comps


def project_observable(emb: EmbeddingMap, op: OperatorSum) -> OperatorSum:
    """Coarse-grained observable A' = T+ A T for block-local term sums.

    Each term may touch at most two blocks; that covers every one- and
    two-site observable used here.
    """
    if op.n_spins != emb.n_spins_source:
        raise ValueError(
            f"operator on {op.n_spins} spins, embedding expects "
            f"{emb.n_spins_source}"
        )
    b = emb.block_size
    offset = op.identity_offset
    out_terms = []
    for term in op.terms:
        by_block = {}
        for site, axis in term.factors:
            blk = (site - 1) // b  # 0-based block index
            by_block.setdefault(blk, []).append(((site - 1) % b + 1, axis))
        if len(by_block) > 2:
            raise ValueError(
                f"term touches {len(by_block)} blocks; only block-local and "
                "two-block terms are supported"
            )
        if not by_block:
            offset += term.coefficient
            continue
        # per touched block: V+ (local factors) V, decomposed over I, sigma
        projected = []
        for blk, factors in sorted(by_block.items()):
            v = emb.block_isometries[blk]
            w = v.conj().T @ _block_local_matrix(sorted(factors), b) @ v
            if np.abs(w - w.conj().T).max() > 1e-12:
                raise AssertionError("projected block matrix not Hermitian")
            projected.append((blk, _pauli_components(w)))
        # expand the product over touched blocks into Pauli terms
        expanded = [(term.coefficient, ())]
        for blk, comps in projected:
            new = []
            for coeff, factors in expanded:
                for axis, c in comps.items():
                    if axis == "i":
                        new.append((coeff * c, factors))
                    else:
                        new.append((coeff * c, factors + ((blk + 1, axis),)))
            expanded = new
        for coeff, factors in expanded:
            if abs(coeff) < 1e-15:
                continue
            if not factors:
                offset += coeff
            else:
                out_terms.append(PauliTerm(coeff, factors))
    return OperatorSum(emb.n_blocks, tuple(out_terms), offset)
