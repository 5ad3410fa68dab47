import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import unit
from qbroadcast.cloners import (
    Asym12,
    Asym13,
    ClonerConfigError,
    InfeasibleAsymmetryError,
    SuccessiveParams,
    constraint_residual,
    direct13_isometry,
    local_cloner_isometry,
    nonlocal_cloner_isometry,
    solve_gamma,
    solve_gamma_batched,
)
from qbroadcast.pipelines.closed_forms import coeffs_13
from qbroadcast.qcore import DensityOp, apply_isometry, partial_trace, to_canonical


def universal_shrink(m, d):
    """Shrink factor of the optimal symmetric 1 -> m cloner on a d-level system."""
    return (m + d) / (m * (d + 1))


def is_isometry(v):
    e = v.entries
    return np.abs(e.conj().T @ e - np.eye(e.shape[1])).max() < 1e-12


def test_asym12_rejects_out_of_range():
    with pytest.raises(ValueError):
        Asym12(1.5)


def test_asym12_symmetric_values():
    a = Asym12(0.5)
    assert a.mu == pytest.approx(4 / 3)
    assert a.p * a.mu == pytest.approx(universal_shrink(2, 2))
    assert a.kappa1 == pytest.approx(universal_shrink(2, 4))
    assert a.kappa2 == pytest.approx(a.kappa1)


def test_asym12_swap_exchanges_kappas():
    a = Asym12(0.3)
    assert a.swapped().kappa1 == pytest.approx(a.kappa2)


def test_successive_params():
    sp = SuccessiveParams(0.6, 0.5)
    assert sp.q1 == pytest.approx(0.4)
    assert sp.tau(1) == pytest.approx(Asym12(0.6).kappa1)
    assert sp.P(2) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        SuccessiveParams(0.5, -0.1)


@given(unit)
def test_cloner_isometries_are_valid(p):
    a = Asym12(p)
    assert is_isometry(local_cloner_isometry(a))
    assert is_isometry(nonlocal_cloner_isometry(a))
    assert nonlocal_cloner_isometry(a).entries.shape == (64, 4)


@given(unit)
def test_local_cloner_shrinks_bloch_vector(p):
    a = Asym12(p)
    out = apply_isometry(DensityOp.basis("0"), local_cloner_isometry(a), [0])
    z1 = np.trace(partial_trace(out, [0]).matrix @ np.diag([1, -1])).real
    z2 = np.trace(partial_trace(out, [1]).matrix @ np.diag([1, -1])).real
    assert z1 == pytest.approx(p * a.mu, abs=1e-12)
    assert z2 == pytest.approx(a.q * a.mu, abs=1e-12)


def test_nonlocal_cloner_symmetric_shrink():
    bell = DensityOp.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2))
    out = apply_isometry(bell, nonlocal_cloner_isometry(Asym12(0.5)), [0, 1], discard=[4, 5])
    c = to_canonical(partial_trace(out, [0, 1]))
    assert np.allclose(c.T, 0.6 * np.diag([1, -1, 1]), atol=1e-12)


def test_asym13_constraint_enforced():
    with pytest.raises(ClonerConfigError):
        Asym13(0.5, 0.5, 0.5, 2)
    with pytest.raises(ValueError):
        Asym13(1.0, 0.0, 0.0, 3)


@pytest.mark.parametrize("d", [2, 4])
def test_symmetric_triple(d):
    w = Asym13.symmetric(d)
    assert abs(constraint_residual(w.alpha, w.beta, w.gamma, d)) < 1e-15
    assert w.norm == pytest.approx(np.sqrt(d / (2 * (d + 1))))


def test_symmetric_triples_give_universal_shrinks():
    c2 = coeffs_13(*[1 / np.sqrt(6)] * 3, d=2)
    assert c2.A1 == pytest.approx(universal_shrink(3, 2))
    assert c2.A1 == pytest.approx(c2.A2) == pytest.approx(c2.A3)
    c4 = coeffs_13(*[np.sqrt(2) / 3] * 3, d=4)
    assert c4.b1 == pytest.approx(universal_shrink(3, 4))
    assert c4.C1 == pytest.approx(c4.C2) == pytest.approx(c4.C3)


@pytest.mark.parametrize("d", [2, 4])
def test_solve_gamma_roots_satisfy_constraint(d):
    roots = solve_gamma(0.3, 0.4, d)
    assert roots == sorted(roots, reverse=True)
    for g in roots:
        assert abs(constraint_residual(0.3, 0.4, g, d)) < 1e-12


def test_solve_gamma_infeasible():
    with pytest.raises(InfeasibleAsymmetryError):
        solve_gamma(1.0, 1.0, 4)
    assert np.isnan(solve_gamma_batched(np.array([1.0]), np.array([1.0]), 4)[0])


def test_from_pair_takes_largest_root():
    w = Asym13.from_pair(0.2, 0.3, 4)
    assert w.gamma == pytest.approx(max(solve_gamma(0.2, 0.3, 4)))


@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from([2, 4]))
def test_direct13_isometry_valid_on_feasible_pairs(alpha, beta, d):
    g = solve_gamma_batched(np.array([alpha]), np.array([beta]), d)[0]
    if np.isnan(g):
        return
    v = direct13_isometry(Asym13(alpha, beta, float(g), d))
    assert is_isometry(v)
    assert v.entries.shape == (d**5, d)


def test_direct13_local_symmetric_shrink():
    out = apply_isometry(DensityOp.basis("0"), direct13_isometry(Asym13.symmetric(2)), [0], discard=[3, 4])
    for wire in range(3):
        z = np.trace(partial_trace(out, [wire]).matrix @ np.diag([1, -1])).real
        assert z == pytest.approx(universal_shrink(3, 2), abs=1e-12)
