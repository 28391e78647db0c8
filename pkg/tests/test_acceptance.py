"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The convergence-trend criteria are implemented exactly as stated. Several
of them fail on this implementation even though every algebraic identity
(isometry, projection identity, discrepancy decay) holds to machine
precision; the failure analyses live in the project decision ledger.
"""

import functools

import numpy as np
import pytest
from scipy.linalg import expm

from spinrg import (HeisenbergCouplings, IsingCouplings, StateVector,
                    TimeGrid, all_up_state, apply_operator, apply_Tdagger,
                    build_embedding_heisenberg, build_heisenberg, build_ising,
                    chi_squared, dense_matrix, epsilon_delta_h, evolve,
                    fit_exponential, renormalize_heisenberg, renormalize_ising,
                    rg_factors, run_comparison, verify_boundary_factors)

GRID = TimeGrid(0.0, 10.0, 201)


def report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


def r_squared(ns, chi2):
    y = np.log2(chi2)
    coef = np.polyfit(ns, y, 1)
    pred = np.polyval(coef, ns)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


@functools.lru_cache(maxsize=None)
def ising_chi2(sizes, J, Gamma, v0, seed=None):
    """chi2 per observable over a size sweep; cached across criteria."""
    out = {"magnetization": [], "correlation": [], "entropy": []}
    for n in sizes:
        c = (IsingCouplings.random(n, seed) if seed is not None
             else IsingCouplings.homogeneous(n, J, Gamma))
        res = run_comparison("ising", c, v0, GRID)
        for so, sr in zip(res.original, res.renormalized):
            out[so.kind].append((n, chi_squared(so, sr)))
    return out


@functools.lru_cache(maxsize=None)
def heisenberg_chi2(sizes, J, Delta, v0):
    out = {"magnetization": [], "correlation": [], "entropy": []}
    for n in sizes:
        res = run_comparison("heisenberg", HeisenbergCouplings(n, J, Delta),
                             v0, GRID)
        for so, sr in zip(res.original, res.renormalized):
            out[so.kind].append((n, chi_squared(so, sr)))
    return out


def truncated_hamiltonian(c):
    """Dense T+ H T evaluated column by column (matrix-free in H)."""
    res = renormalize_ising(c)
    emb = res.embedding
    h = build_ising(c)
    dim = 2 ** (c.n_spins // 2)
    out = np.zeros((dim, dim), complex)
    for col in range(dim):
        amp = np.zeros(dim, complex)
        amp[col] = 1.0
        big = np.zeros(2**c.n_spins, complex)
        # embed the basis column: tensor product of per-block isometry columns
        from spinrg import apply_T
        big = apply_T(emb, StateVector(c.n_spins // 2, amp)).amplitudes
        hv = apply_operator(h, StateVector(c.n_spins, big))
        t = hv.amplitudes.reshape((4,) * emb.n_blocks)
        for k, m in enumerate(emb.block_isometries):
            t = np.moveaxis(np.tensordot(m.conj().T, t, axes=(1, k)), 0, k)
        out[:, col] = t.reshape(-1)
    return res, out


def test_isometry_and_projection_identity():
    rng = np.random.default_rng(101)
    worst_iso, worst_proj = 0.0, 0.0
    for n in (4, 6, 8, 10, 12):
        for _ in range(50):
            c = IsingCouplings(n, tuple(rng.uniform(0.05, 2.0, n)),
                               tuple(rng.uniform(0.05, 2.0, n)))
            res, tht = truncated_hamiltonian(c)
            t = res.embedding.dense()
            worst_iso = max(worst_iso, np.max(np.abs(
                t.conj().T @ t - np.eye(t.shape[1]))))
            h_rg = dense_matrix(build_ising(res.couplings))
            h_rg = h_rg + res.energy_offset * np.eye(h_rg.shape[0])
            worst_proj = max(worst_proj, np.max(np.abs(tht - h_rg)))
    ok = worst_iso < 1e-13 and worst_proj < 1e-12
    assert report("isometry and projection identity", ok,
                  f"max |T+T-I| = {worst_iso:.2e}, "
                  f"max |T+HT - H_RG| = {worst_proj:.2e}")


def test_block_eigenvalue_equation():
    from spinrg import OperatorSum, PauliTerm
    from spinrg.ising_rg import block_eigensystem
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(1000):
        J, Gamma = rng.uniform(0.0, 2.0, size=2)
        e = block_eigensystem(J, Gamma)
        h = dense_matrix(OperatorSum(2, (
            PauliTerm(-J, ((1, "z"), (2, "z"))),
            PauliTerm(-Gamma, ((1, "x"),)))))
        v = np.zeros((4, 2))
        v[0b00, 0], v[0b10, 0] = e.a_plus, e.a_minus
        v[0b11, 1], v[0b01, 1] = e.a_plus, e.a_minus
        for col in range(2):
            worst = max(worst, np.linalg.norm(
                h @ v[:, col] + e.epsilon * v[:, col]))
    assert report("block eigenvalue equation", worst <= 1e-13,
                  f"max residual = {worst:.2e} over 1000 draws")


def test_evolution_oracle():
    worst = 1.0
    for model, h in (
        ("ising", build_ising(IsingCouplings.homogeneous(8, 1.0, 0.5))),
        ("heisenberg", build_heisenberg(HeisenbergCouplings(8, 1.0, 1.0))),
    ):
        hm = dense_matrix(h)
        v0 = all_up_state(8) if model == "ising" else \
            StateVector(8, (np.random.default_rng(5).standard_normal(256)
                            + 0j)).normalize()
        for t in (0.5, 1.0, 5.0, 10.0):
            want = expm(-1j * t * hm) @ v0.amplitudes
            got = evolve(h, v0, t).amplitudes
            worst = min(worst, abs(np.vdot(want, got)))
    assert report("evolution oracle", worst >= 1 - 1e-10,
                  f"worst fidelity = {worst:.15f}")


def test_ising_convergence_trend():
    chi2 = ising_chi2((6, 8, 10, 12, 14, 16), 1.0, 0.5, "all_up")
    details, ok = [], True
    for kind, points in chi2.items():
        ns = [n for n, _ in points]
        vals = [v for _, v in points]
        dec = strictly_decreasing(vals)
        r2 = r_squared(ns, vals)
        fit = fit_exponential(points)
        good = dec and r2 >= 0.9 and 0.1 <= fit.b <= 0.6
        ok = ok and good
        details.append(f"{kind}: chi2 {vals[0]:.3g}->{vals[-1]:.3g} "
                       f"{'dec' if dec else 'non-dec'}, R2={r2:.2f}, "
                       f"b={fit.b:.3f}")
    assert report("ising convergence trend", ok, "; ".join(details)), (
        "chi-squared grows and saturates with N instead of decaying: the "
        "renormalized couplings flow (J, Gamma) -> (J, Gamma)*(J/eps), i.e. "
        "g -> g^2, so original and renormalized chains approach different "
        "large-N limit curves and their pointwise distance cannot vanish; "
        "see the decision ledger for the full analysis"
    )


def test_critical_point_convergence():
    chi2 = ising_chi2((8, 12, 16), 1.0, 1.0, "all_up")
    pts = dict(chi2["magnetization"])
    ok = pts[16] <= pts[8] / 4
    assert report("critical point convergence", ok,
                  f"chi2_M(8)={pts[8]:.3f}, chi2_M(16)={pts[16]:.3f}, "
                  f"need <= {pts[8] / 4:.3f}"), (
        "magnetization chi-squared does decrease at the critical point but "
        "saturates near half the required factor-4 drop; see the decision "
        "ledger"
    )


def test_random_couplings_convergence():
    chi2 = ising_chi2((8, 12, 16), 0.0, 0.0, "all_up", seed=7)
    details, ok = [], True
    for kind, points in chi2.items():
        vals = [v for _, v in points]
        dec = strictly_decreasing(vals)
        ok = ok and dec
        details.append(f"{kind}: {vals[0]:.3g}->{vals[1]:.3g}->{vals[2]:.3g}"
                       f" {'dec' if dec else 'non-dec'}")
    assert report("random couplings convergence", ok, "; ".join(details)), (
        "correlation and entropy chi-squared are non-monotone for random "
        "couplings; see the decision ledger"
    )


def test_neel_convergence():
    chi2 = ising_chi2((8, 12, 16), 1.0, 0.5, "neel")
    details, ok = [], True
    for kind, points in chi2.items():
        vals = [v for _, v in points]
        dec = strictly_decreasing(vals)
        ok = ok and dec
        details.append(f"{kind}: {vals[0]:.3g}->{vals[1]:.3g}->{vals[2]:.3g}"
                       f" {'dec' if dec else 'non-dec'}")
    assert report("neel convergence", ok, "; ".join(details)), (
        "the alternating state lies almost entirely outside the kept "
        "subspace (truncation fidelity a_minus^(N/2)), so the mapped state "
        "misrepresents the dynamics and chi-squared does not decrease; see "
        "the decision ledger"
    )


def test_heisenberg_closed_forms():
    f = rg_factors(1.0, 1.0)
    exact = (f.x == 0.0 and abs(f.xi_x - 2 / 3) < 1e-15
             and abs(f.J_prime - 4 / 9) < 1e-15 and f.Delta_prime == 1.0
             and abs(f.E_B + 1.0) < 1e-15)
    worst_e, worst_dev = 0.0, 0.0
    for delta in (0.0, 0.25, 0.5, 1.0, 2.0):
        c = HeisenbergCouplings(6, 1.0, delta)
        emb = build_embedding_heisenberg(c)
        v = emb.block_isometries[0]
        h = dense_matrix(build_heisenberg(HeisenbergCouplings(3, 1.0, delta)))
        f = rg_factors(1.0, delta)
        for col in range(2):
            worst_e = max(worst_e, np.linalg.norm(
                h @ v[:, col] - f.E_B * v[:, col]))
        worst_dev = max(worst_dev, verify_boundary_factors(emb, c).max_deviation)
    ok = exact and worst_e < 1e-10 and worst_dev <= 1e-8
    assert report("heisenberg closed forms", ok,
                  f"isotropic point exact = {exact}, doublet-energy residual "
                  f"= {worst_e:.2e}, boundary-factor deviation = {worst_dev:.2e}")


def test_heisenberg_convergence():
    details, ok = [], True
    for delta in (1.0, 0.0, 0.5):
        chi2 = heisenberg_chi2((6, 9, 12, 15), 1.0, delta, "neel")
        for kind, points in chi2.items():
            vals = [v for _, v in points]
            noninc = all(b <= a for a, b in zip(vals, vals[1:]))
            try:
                fit = fit_exponential(points, with_offset=True)
                structure = fit.c >= 0 and fit.b > 0
                fit_desc = f"b={fit.b:.3f}, c={fit.c:.3g}"
            except (ValueError, RuntimeError) as exc:
                structure = False
                fit_desc = f"fit failed: {exc}"
            ok = ok and noninc and structure
            details.append(
                f"D={delta} {kind}: {vals[0]:.3g}->{vals[-1]:.3g} "
                f"{'noninc' if noninc else 'inc'}, {fit_desc}")
    assert report("heisenberg convergence", ok, "; ".join(details)), (
        "total magnetization is conserved by the model for every allowed "
        "initial state, so its chi-squared is identically ~0 and no decay "
        "rate b > 0 exists; correlation chi-squared grows with N; see the "
        "decision ledger"
    )


def test_epsilon_decay():
    rows = [(n, epsilon_delta_h(IsingCouplings.homogeneous(n, 1.0, 1.0)).epsilon)
            for n in (4, 6, 8, 10, 12)]
    vals = [e for _, e in rows]
    fit = fit_exponential(rows)
    zero = epsilon_delta_h(IsingCouplings.homogeneous(8, 1.0, 0.0)).epsilon
    ok = (strictly_decreasing(vals) and abs(fit.b - 0.5) <= 0.1
          and abs(fit.a - 0.25) <= 0.1 and abs(zero) < 1e-12)
    assert report("epsilon decay", ok,
                  f"a={fit.a:.6f}, b={fit.b:.6f}, eps(Gamma=0)={zero:.2e}")
