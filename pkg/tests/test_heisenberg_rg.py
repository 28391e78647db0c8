import numpy as np
import pytest

from spinrg import (HeisenbergCouplings, OperatorSum, PauliTerm,
                    build_embedding_heisenberg, build_heisenberg, dense_matrix,
                    renormalize_heisenberg, rg_factors,
                    verify_boundary_factors)


def test_rg_factors_isotropic_point():
    f = rg_factors(1.0, 1.0)
    assert f.x == 0.0
    assert abs(f.xi_x - 2 / 3) < 1e-15
    assert abs(f.xi_z - 2 / 3) < 1e-15
    assert abs(f.J_prime - 4 / 9) < 1e-15
    assert abs(f.Delta_prime - 1.0) < 1e-15
    assert abs(f.E_B + 1.0) < 1e-15


def test_rg_factors_xx_point():
    f = rg_factors(1.0, 0.0)
    assert abs(f.x + 0.121320) < 1e-6
    assert abs(f.xi_x - 0.707107) < 1e-6
    assert abs(f.xi_z - 0.5) < 1e-6
    assert abs(f.J_prime - 0.5) < 1e-6
    assert f.Delta_prime == 0.0
    assert abs(f.E_B + 0.707107) < 1e-6


def test_rg_factors_half_anisotropy():
    f = rg_factors(1.0, 0.5)
    assert np.isfinite([f.x, f.xi_x, f.xi_z, f.J_prime, f.Delta_prime]).all()
    assert 0.0 < f.Delta_prime < 1.0


def test_block_doublet_energy_matches_dense():
    for delta in (0.0, 0.25, 0.5, 1.0, 2.0):
        f = rg_factors(1.0, delta)
        emb = build_embedding_heisenberg(HeisenbergCouplings(6, 1.0, delta))
        v = emb.block_isometries[0]
        h = dense_matrix(build_heisenberg(HeisenbergCouplings(3, 1.0, delta)))
        for col in range(2):
            assert np.linalg.norm(h @ v[:, col] - f.E_B * v[:, col]) < 1e-10


def test_doublet_is_sz_eigenbasis():
    for delta in np.arange(0.0, 2.01, 0.1):
        emb = build_embedding_heisenberg(HeisenbergCouplings(6, 1.0, delta))
        v = emb.block_isometries[0]
        assert np.linalg.norm(v.conj().T @ v - np.eye(2)) < 1e-13
        sz = 0.5 * dense_matrix(OperatorSum(3, tuple(
            PauliTerm(1.0, ((s, "z"),)) for s in (1, 2, 3))))
        w = v.conj().T @ sz @ v
        assert np.linalg.norm(w - np.diag([0.5, -0.5])) < 1e-12


def test_isotropic_doublet_below_quartet():
    h = dense_matrix(build_heisenberg(HeisenbergCouplings(3, 1.0, 1.0)))
    evals = np.linalg.eigvalsh(h)
    assert np.allclose(evals[:2], -1.0, atol=1e-12)
    assert np.allclose(evals[2:4], 0.0, atol=1e-12)
    assert np.allclose(evals[4:], 0.5, atol=1e-12)


def test_renormalize_isotropic():
    res = renormalize_heisenberg(HeisenbergCouplings(12, 1.0, 1.0))
    assert res.couplings.n_spins == 4
    assert abs(res.couplings.J - 4 / 9) < 1e-14
    assert abs(res.couplings.Delta - 1.0) < 1e-14
    assert abs(res.energy_offset + 4.0) < 1e-12


def test_renormalize_xx_long_chain():
    res = renormalize_heisenberg(HeisenbergCouplings(24, 1.0, 0.0))
    assert res.couplings.n_spins == 8
    assert abs(res.couplings.J - 0.5) < 1e-12
    assert res.couplings.Delta == 0.0
    assert abs(res.energy_offset + 8 * 0.707107) < 1e-5


def test_isotropy_is_a_fixed_point():
    res1 = renormalize_heisenberg(HeisenbergCouplings(18, 1.0, 1.0))
    res2 = renormalize_heisenberg(res1.couplings)
    assert abs(res2.couplings.Delta - 1.0) < 1e-12


def test_boundary_factors():
    rep = verify_boundary_factors(
        build_embedding_heisenberg(HeisenbergCouplings(6, 1.0, 1.0)),
        HeisenbergCouplings(6, 1.0, 1.0))
    assert abs(rep.measured_xi_x - 2 / 3) < 1e-10
    assert abs(rep.measured_xi_z - 2 / 3) < 1e-10
    assert rep.max_deviation < 1e-10
    rep0 = verify_boundary_factors(
        build_embedding_heisenberg(HeisenbergCouplings(6, 1.0, 0.0)),
        HeisenbergCouplings(6, 1.0, 0.0))
    assert abs(rep0.measured_xi_x - 0.707107) < 1e-6
    assert abs(rep0.measured_xi_z - 0.5) < 1e-6
    assert abs(rep0.measured_xi_y - rep0.measured_xi_x) < 1e-12


def test_full_projection_identity():
    for n, delta in ((6, 1.0), (6, 0.5), (9, 1.0), (9, 0.0)):
        c = HeisenbergCouplings(n, 1.0, delta)
        res = renormalize_heisenberg(c)
        t = res.embedding.dense()
        h = dense_matrix(build_heisenberg(c))
        coarse = build_heisenberg(res.couplings) if n > 3 else None
        h_rg = dense_matrix(coarse)
        h_rg = h_rg + res.energy_offset * np.eye(h_rg.shape[0])
        assert np.max(np.abs(t.conj().T @ h @ t - h_rg)) < 1e-8


def test_delta_prime_monotone_on_unit_interval():
    deltas = np.linspace(0.0, 1.0, 51)
    primes = [rg_factors(1.0, d).Delta_prime for d in deltas]
    assert all(b - a > -1e-12 for a, b in zip(primes, primes[1:]))


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        rg_factors(0.0, 1.0)
    with pytest.raises(ValueError):
        rg_factors(1.0, -0.5)
