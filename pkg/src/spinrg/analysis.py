"""Convergence quantification: chi-squared distances between paired curves,
exponential decay fits, and the normalized projector discrepancy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import OperatorSum, PAULI, StateVector, apply_operator
from .models import HeisenbergCouplings, IsingCouplings, build_heisenberg, build_ising
from .heisenberg_rg import build_embedding_heisenberg
from .ising_rg import build_embedding_ising
from .observables import TimeSeries


def chi_squared(s1: TimeSeries, s2: TimeSeries) -> float:
    """Plain sum of squared differences over the shared time grid."""
    if s1.grid != s2.grid:
        raise ValueError("series are sampled on different grids")
    if s1.kind != s2.kind:
        raise ValueError(
            f"series measure different observables: {s1.kind} vs {s2.kind}"
        )
    d = s1.values - s2.values
    return float(np.dot(d, d))


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    residual: float
    model: str  # "a*2^(-bN)" or "a*2^(-bN)+c"


def _loglinear_fit(ns, chi2):
    """Exact linear least squares of log2(chi2) against N."""
    ns = np.asarray(ns, dtype=float)
    y = np.log2(chi2)
    slope, intercept = np.polyfit(ns, y, 1)
    return float(2.0**intercept), float(-slope)


def fit_exponential(points, with_offset: bool = False) -> FitResult:
    """Fit (N, chi2) pairs to a*2^(-bN), optionally plus an offset c >= 0."""
    points = sorted((int(n), float(v)) for n, v in points)
    ns = np.array([p[0] for p in points], dtype=float)
    chi2 = np.array([p[1] for p in points], dtype=float)
    need = 4 if with_offset else 3
    if len(points) < need:
        raise ValueError(f"need at least {need} points, got {len(points)}")

    if not with_offset:
        if np.any(chi2 <= 0):
            raise ValueError("non-positive chi2 value in log-linear fit")
        a, b = _loglinear_fit(ns, chi2)
        resid = float(np.sum((a * 2.0 ** (-b * ns) - chi2) ** 2))
        return FitResult(a, b, 0.0, resid, "a*2^(-bN)")

    # degenerate constant data: the model collapses to the offset alone
    if np.ptp(chi2) < 1e-15 * max(1.0, np.abs(chi2).max()):
        c = float(np.mean(chi2))
        resid = float(np.sum((chi2 - c) ** 2))
        return FitResult(0.0, 0.0, c, resid, "a*2^(-bN)+c")

    c0 = float(chi2.min()) / 2.0
    shifted = np.clip(chi2 - c0, 1e-300, None)
    a0, b0 = _loglinear_fit(ns, shifted)

    def residuals(p):
        a, b, c = p
        return a * 2.0 ** (-b * ns) + c - chi2

    sol = least_squares(residuals, x0=[max(a0, 1e-12), b0, c0],
                        bounds=([0.0, -np.inf, 0.0], [np.inf, np.inf, np.inf]),
                        xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if not sol.success:
        raise RuntimeError(f"offset fit did not converge: {sol.message}")
    a, b, c = sol.x
    resid = float(np.sum(residuals(sol.x) ** 2))
    return FitResult(float(a), float(b), float(c), resid, "a*2^(-bN)+c")


@dataclass(frozen=True)
class DiscrepancyReport:
    n_spins: int
    tr_p_h2: float
    tr_ph_ph: float
    tr_h2: float
    epsilon: float


def _pauli_string_key(term):
    return term.factors


def _tr_h2(op: OperatorSum) -> float:
    """Tr(H^2) from Pauli-string orthogonality (identity offset excluded)."""
    acc = {}
    for t in op.terms:
        acc[_pauli_string_key(t)] = acc.get(_pauli_string_key(t), 0.0) + t.coefficient
    return float(2.0**op.n_spins * sum(c * c for c in acc.values()))


def _strip_offset(op):
    return OperatorSum(op.n_spins, op.terms, 0.0)


def _epsilon_direct(H: OperatorSum, emb) -> DiscrepancyReport:
    """Trace evaluation through the embedding columns; no dense H needed."""
    n = H.n_spins
    T = emb.dense()
    HT = np.column_stack([
        apply_operator(H, StateVector(n, T[:, k])).amplitudes
        for k in range(T.shape[1])
    ])
    tr_p_h2 = float(np.sum(np.abs(HT) ** 2))          # Tr(T+ H^2 T)
    M = T.conj().T @ HT                               # T+ H T, Hermitian
    tr_ph_ph = float(np.sum(np.abs(M) ** 2))          # Tr(M^2)
    tr_h2 = _tr_h2(H)
    eps = (tr_p_h2 - tr_ph_ph) / tr_h2
    return DiscrepancyReport(n, tr_p_h2, tr_ph_ph, tr_h2, float(eps))


def _term_matrix_on_blocks(term, blocks, block_size):
    """Dense matrix of a Pauli term restricted to the given block tuple."""
    ops = dict(term.factors)
    m = np.ones((1, 1), dtype=complex)
    for blk in blocks:
        for p in range(blk * block_size + 1, (blk + 1) * block_size + 1):
            m = np.kron(m, PAULI[ops.get(p, "i")])
    return term.coefficient * m


def _epsilon_factorized(H: OperatorSum, emb) -> DiscrepancyReport:
    """Pairwise term traces on the union of touched blocks.

    The projector factorizes over blocks, and every Hamiltonian term
    touches at most two adjacent blocks, so each pairwise trace reduces to
    a product over at most four blocks times 2 per untouched block.
    """
    b = emb.block_size
    nb = emb.n_blocks
    n = H.n_spins
    projs = [v @ v.conj().T for v in emb.block_isometries]

    def touched(term):
        return sorted({(s - 1) // b for s, _ in term.factors})

    terms = list(H.terms)
    blocks_of = [touched(t) for t in terms]
    tr_p_h2 = 0.0
    tr_ph_ph = 0.0
    for ia, ta in enumerate(terms):
        for ib, tb in enumerate(terms):
            union = sorted(set(blocks_of[ia]) | set(blocks_of[ib]))
            ma = _term_matrix_on_blocks(ta, union, b)
            mb = _term_matrix_on_blocks(tb, union, b)
            p_local = np.ones((1, 1), dtype=complex)
            for blk in union:
                p_local = np.kron(p_local, projs[blk])
            weight = 2.0 ** (nb - len(union))
            tr_p_h2 += weight * np.trace(p_local @ ma @ mb).real
            tr_ph_ph += weight * np.trace(p_local @ ma @ p_local @ mb).real
    tr_h2 = _tr_h2(H)
    eps = (tr_p_h2 - tr_ph_ph) / tr_h2
    return DiscrepancyReport(n, float(tr_p_h2), float(tr_ph_ph), tr_h2,
                             float(eps))


def epsilon_delta_h(c, method: str = "auto",
                    dense_cap: int = 14) -> DiscrepancyReport:
    """Normalized discrepancy between embedding-then-H and H'-then-embedding.

    ``method`` is "direct" (embedding-column traces, N <= dense_cap),
    "factorized" (block-local pair traces, any supported N) or "auto".
    """
    if isinstance(c, IsingCouplings):
        H = _strip_offset(build_ising(c))
        emb = build_embedding_ising(c)
    elif isinstance(c, HeisenbergCouplings):
        H = _strip_offset(build_heisenberg(c))
        emb = build_embedding_heisenberg(c)
    else:
        raise TypeError(f"unsupported coupling type {type(c).__name__}")
    if method == "auto":
        method = "direct" if c.n_spins <= 12 else "factorized"
    if method == "direct":
        if c.n_spins > dense_cap:
            raise ValueError(
                f"direct path supports N <= {dense_cap}, got {c.n_spins}; "
                "use the factorized path"
            )
        return _epsilon_direct(H, emb)
    if method == "factorized":
        return _epsilon_factorized(H, emb)
    raise ValueError(f"unknown method {method!r}")
