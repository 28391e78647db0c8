"""Spin-chain Hamiltonians: transverse-field Ising and anisotropic Heisenberg."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import OperatorSum, PauliTerm


@dataclass(frozen=True)
class IsingCouplings:
    """Per-site couplings of the periodic transverse-field Ising chain.

    Bond i couples sites (i, i+1) with site N+1 identified with site 1.
    """

    n_spins: int
    J: tuple = ()
    Gamma: tuple = ()

    def __post_init__(self):
        # Odd or small N is allowed so renormalized chains (e.g. 6 -> 3
        # sites) stay representable; blocking itself requires even N >= 4
        # and checks that separately.
        n = self.n_spins
        if n < 2:
            raise ValueError(f"n_spins must be >= 2, got {n}")
        J = tuple(float(x) for x in self.J)
        Gamma = tuple(float(x) for x in self.Gamma)
        if len(J) != n or len(Gamma) != n:
            raise ValueError(
                f"J and Gamma must each have length {n}, got "
                f"{len(J)} and {len(Gamma)}"
            )
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "Gamma", Gamma)

    def require_blockable(self):
        """Reject coupling sets that cannot undergo the two-site blocking."""
        n = self.n_spins
        if n < 4 or n % 2 != 0:
            raise ValueError(
                f"blocking needs an even chain of >= 4 spins, got {n}"
            )
        from .embedding import DegenerateBlockError

        for i in range(0, n, 2):
            if self.J[i] == 0.0 and self.Gamma[i] == 0.0:
                raise DegenerateBlockError(
                    f"block {i // 2 + 1} has (J, Gamma) = (0, 0) at site "
                    f"{i + 1}; its eigensystem is degenerate"
                )

    @classmethod
    def homogeneous(cls, n_spins, J, Gamma):
        return cls(n_spins, (J,) * n_spins, (Gamma,) * n_spins)

    @classmethod
    def random(cls, n_spins, seed):
        """Couplings drawn i.i.d. uniform on [0, 1] from a seeded generator."""
        rng = np.random.default_rng(seed)
        return cls(n_spins, tuple(rng.uniform(0, 1, n_spins)),
                   tuple(rng.uniform(0, 1, n_spins)))


@dataclass(frozen=True)
class HeisenbergCouplings:
    """Global couplings of the open antiferromagnetic XXZ chain."""

    n_spins: int
    J: float = 1.0
    Delta: float = 1.0

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError(f"n_spins must be >= 2, got {self.n_spins}")
        if self.J <= 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if self.Delta < 0:
            raise ValueError(f"Delta must be >= 0, got {self.Delta}")

    def require_blockable(self):
        """Reject sizes that cannot undergo the three-site blocking."""
        if self.n_spins < 6 or self.n_spins % 3 != 0:
            raise ValueError(
                f"blocking needs a chain divisible by 3 with >= 6 spins, "
                f"got {self.n_spins}"
            )


def build_ising(c: IsingCouplings) -> OperatorSum:
    """H = -sum_i J_i sz_i sz_{i+1} - sum_i Gamma_i sx_i, periodic."""
    n = c.n_spins
    terms = []
    for i in range(1, n + 1):
        j = i % n + 1  # wrap bond N -> 1
        lo, hi = min(i, j), max(i, j)
        terms.append(PauliTerm(-c.J[i - 1], ((lo, "z"), (hi, "z"))))
    for i in range(1, n + 1):
        terms.append(PauliTerm(-c.Gamma[i - 1], ((i, "x"),)))
    return OperatorSum(n, tuple(terms))


def build_heisenberg(c: HeisenbergCouplings) -> OperatorSum:
    """H = J sum_j (Sx Sx + Sy Sy + Delta Sz Sz) on bonds 1..N-1, S = sigma/2."""
    n = c.n_spins
    terms = []
    for j in range(1, n):
        terms.append(PauliTerm(c.J / 4, ((j, "x"), (j + 1, "x"))))
        terms.append(PauliTerm(c.J / 4, ((j, "y"), (j + 1, "y"))))
        terms.append(PauliTerm(c.J * c.Delta / 4, ((j, "z"), (j + 1, "z"))))
    return OperatorSum(n, tuple(terms))
