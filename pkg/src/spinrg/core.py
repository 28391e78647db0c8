"""State vectors, Pauli-sum operators and Krylov time evolution.

Conventions used everywhere in this package:

* sites are numbered 1..N, site 1 maps to the most significant bit of the
  basis-state index;
* bit 0 is spin up, bit 1 is spin down, so ``sigma_z |up> = +|up>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSE_CAP_DEFAULT = 14


class DimensionMismatchError(ValueError):
    """Operator and state act on different numbers of spins."""


class DenseCapExceededError(ValueError):
    """Refused to materialize a dense matrix above the configured size cap."""


class KrylovConvergenceError(RuntimeError):
    """Krylov step did not reach tolerance at the maximum subspace size."""

    def __init__(self, residual, m):
        self.residual = residual
        self.m = m
        super().__init__(
            f"Krylov evolution not converged at subspace size {m}: "
            f"residual estimate {residual:.3e}"
        )


@dataclass
class StateVector:
    """Complex amplitudes over the 2^n computational basis."""

    n_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n_spins,):
            raise ValueError(
                f"expected {2**self.n_spins} amplitudes for {self.n_spins} "
                f"spins, got shape {self.amplitudes.shape}"
            )

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self):
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_spins, self.amplitudes / n)

    def copy(self):
        return StateVector(self.n_spins, self.amplitudes.copy())


def basis_state(n_spins, bits):
    """Computational basis state from a bit sequence, site 1 first (0 = up)."""
    bits = list(bits)
    if len(bits) != n_spins:
        raise ValueError(f"need {n_spins} bits, got {len(bits)}")
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        idx = (idx << 1) | b
    amp = np.zeros(2**n_spins, dtype=complex)
    amp[idx] = 1.0
    return StateVector(n_spins, amp)


def all_up_state(n_spins):
    return basis_state(n_spins, [0] * n_spins)


def neel_state(n_spins):
    """Alternating configuration: odd sites up, even sites down."""
    return basis_state(n_spins, [i % 2 for i in range(n_spins)])


@dataclass(frozen=True)
class PauliTerm:
    """A real multiple of a product of Pauli matrices on distinct sites.

    An empty factor list denotes a scaled identity.
    """

    coefficient: float
    factors: tuple = ()  # ((site, axis), ...) sorted by site

    def __post_init__(self):
        factors = tuple((int(s), str(a)) for s, a in self.factors)
        object.__setattr__(self, "factors", factors)
        sites = [s for s, _ in factors]
        if sorted(sites) != sites or len(set(sites)) != len(sites):
            raise ValueError("factor sites must be sorted and distinct")
        for s, a in factors:
            if s < 1:
                raise ValueError(f"site index {s} out of range")
            if a not in ("x", "y", "z"):
                raise ValueError(f"unknown Pauli axis {a!r}")


@dataclass(frozen=True)
class OperatorSum:
    """Hermitian operator as a list of Pauli terms plus an identity offset."""

    n_spins: int
    terms: tuple = ()
    identity_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            for s, _ in t.factors:
                if s > self.n_spins:
                    raise ValueError(
                        f"term touches site {s} but operator has "
                        f"{self.n_spins} spins"
                    )

    def with_offset(self, offset):
        return OperatorSum(self.n_spins, self.terms, offset)

    def __add__(self, other):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        if other.n_spins != self.n_spins:
            raise DimensionMismatchError("cannot add operators of different size")
        return OperatorSum(
            self.n_spins,
            self.terms + other.terms,
            self.identity_offset + other.identity_offset,
        )


def _apply_term(term, psi, n):
    """Action of a single Pauli term on a (2,)*n shaped amplitude tensor."""
    out = psi
    pref = term.coefficient + 0j
    flip_axes = []
    for site, axis in term.factors:
        ax = site - 1
        if axis == "z":
            sl = [slice(None)] * n
            sl[ax] = 1
            if out is psi:
                out = psi.copy()
            out[tuple(sl)] *= -1.0
        elif axis == "x":
            flip_axes.append(ax)
        else:  # y
            # sigma_y: |0> -> i|1>, |1> -> -i|0>; apply the sign before the flip
            sl = [slice(None)] * n
            sl[ax] = 1
            if out is psi:
                out = psi.copy()
            out[tuple(sl)] *= -1.0
            pref *= 1j
            flip_axes.append(ax)
    if flip_axes:
        sl = [slice(None)] * n
        for ax in flip_axes:
            sl[ax] = slice(None, None, -1)
        out = np.ascontiguousarray(out[tuple(sl)])
    elif out is psi:
        out = psi.copy()
    out *= pref
    return out


def apply_operator(op: OperatorSum, v: StateVector) -> StateVector:
    """Matrix-free H @ v, term by term."""
    if op.n_spins != v.n_spins:
        raise DimensionMismatchError(
            f"operator on {op.n_spins} spins applied to state on {v.n_spins}"
        )
    n = op.n_spins
    shape = (2,) * n
    psi = v.amplitudes.reshape(shape)
    if op.identity_offset != 0.0:
        acc = op.identity_offset * psi
    else:
        acc = np.zeros(shape, dtype=complex)
    for term in op.terms:
        acc += _apply_term(term, psi, n)
    return StateVector(n, acc.reshape(-1))


@dataclass(frozen=True)
class EvolveConfig:
    max_krylov_dim: int = 30
    dt_max: float = 0.1
    tol: float = 1e-10


def _krylov_step(op, amp, dt, cfg):
    """One exp(-i*H*dt) step by Lanczos with full reorthogonalization."""
    n = int(round(np.log2(amp.size)))
    shape = (2,) * n
    beta0 = np.linalg.norm(amp)
    if beta0 == 0.0:
        return amp.copy()
    m_max = cfg.max_krylov_dim
    V = np.empty((m_max, amp.size), dtype=complex)
    V[0] = amp / beta0
    alphas, betas = [], []
    y = None
    err = np.inf
    matvec = lambda x: apply_operator(op, StateVector(n, x)).amplitudes

    for j in range(m_max):
        w = matvec(V[j])
        a = float(np.vdot(V[j], w).real)
        alphas.append(a)
        w -= a * V[j]
        if j > 0:
            w -= betas[-1] * V[j - 1]
        # full reorthogonalization keeps the basis orthonormal
        w -= (V[: j + 1].conj() @ w) @ V[: j + 1]
        b = float(np.linalg.norm(w))
        lam, S = eigh_tridiagonal(alphas, betas)
        y = S @ (np.exp(-1j * dt * lam) * S[0])
        if b < 1e-12 * max(1.0, abs(a)):
            err = 0.0  # invariant subspace: result exact
            break
        err = abs(b * y[-1] * dt)
        if err < cfg.tol:
            break
        betas.append(b)
        if j + 1 < m_max:
            V[j + 1] = w / b
    else:
        raise KrylovConvergenceError(err, m_max)
    m = len(alphas)
    return beta0 * (y @ V[:m])


def evolve(op: OperatorSum, v: StateVector, t: float,
           cfg: EvolveConfig = EvolveConfig()) -> StateVector:
    """exp(-i*H*t) @ v via sub-stepped Lanczos."""
    if op.n_spins != v.n_spins:
        raise DimensionMismatchError(
            f"operator on {op.n_spins} spins, state on {v.n_spins}"
        )
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return v.copy()
    n_steps = max(1, int(np.ceil(t / cfg.dt_max - 1e-12)))
    dt = t / n_steps
    amp = v.amplitudes
    for _ in range(n_steps):
        amp = _krylov_step(op, amp, dt, cfg)
    return StateVector(v.n_spins, amp)


@dataclass
class ReducedDensityMatrix:
    n_sub: int
    entries: np.ndarray


def partial_trace_prefix(v: StateVector, n_sub: int) -> ReducedDensityMatrix:
    """Reduced density matrix of the first n_sub sites."""
    if not 1 <= n_sub < v.n_spins:
        raise ValueError(f"n_sub must be in [1, {v.n_spins - 1}], got {n_sub}")
    m = v.amplitudes.reshape(2**n_sub, -1)
    rho = m @ m.conj().T
    return ReducedDensityMatrix(n_sub, rho)


def dense_matrix(op: OperatorSum, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Full 2^N x 2^N matrix of the operator. Oracle and small-N use only."""
    n = op.n_spins
    if n > cap:
        raise DenseCapExceededError(
            f"dense matrix for {n} spins exceeds the cap of {cap}"
        )
    dim = 2**n
    out = op.identity_offset * np.eye(dim, dtype=complex)
    for term in op.terms:
        m = np.ones((1, 1), dtype=complex)
        ops = dict(term.factors)
        for site in range(1, n + 1):
            m = np.kron(m, PAULI[ops.get(site, "i")])
        out += term.coefficient * m
    return out


def expectation(op: OperatorSum, v: StateVector) -> float:
    """<v|op|v>, returned as a real number (imaginary residue discarded)."""
    val = np.vdot(v.amplitudes, apply_operator(op, v).amplitudes)
    return float(val.real)
