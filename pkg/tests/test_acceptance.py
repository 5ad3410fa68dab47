"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from qbroadcast.checks import (
    closed_form_checks,
    direct_local_check,
    discord_checks,
    mems_ii_local_check,
    random_state,
    successive_local_check,
)
from qbroadcast.cloners import (
    Asym12,
    Asym13,
    direct13_isometry,
    local_cloner_isometry,
    nonlocal_cloner_isometry,
    solve_gamma,
)
from qbroadcast.measures import concurrence, geometric_discord, min_pt_eigenvalue
from qbroadcast.qcore import DensityOp, to_canonical
from qbroadcast.pipelines import Group, Mode, asymmetry_cutoff, fig2_table, fig4_table, fig6_table, k_ranges
from qbroadcast.pipelines.closed_forms import coeffs_13
from qbroadcast.pipelines.scans import (
    StateGrid,
    direct13,
    mems_threshold,
    min_pt_zip,
    min_threshold_concurrence,
    one_to_two,
)
from qbroadcast.unisearch import dominance, family_grid, reference_unitaries, u4_from_params

GRID = 201
SYMMETRIC_D4 = np.sqrt(2) / 3

WERNER_MATRIX = np.array([
    [1, 0, 0, 0],
    [0, -0.0773, -0.9898, -0.1194],
    [0, -0.8255, 0.1306, -0.5490],
    [0, 0.5590, 0.0561, -0.8272],
])
BDS_MATRIX = np.array([
    [0.8090, 0.1816, -0.4523, 0.3286],
    [-0.1816, -0.8273, -0.4301, 0.3125],
    [0.5590, -0.5317, 0.5148, -0.3740],
    [0, 0, -0.5878, -0.8090],
])


def fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}"
    if isinstance(v, tuple):
        return "(" + ",".join(fmt(x) for x in v) + ")"
    return str(v)


def report(crit, ok, **detail):
    line = f"C{crit} {'PASS' if ok else 'FAIL'} " + " ".join(f"{k}={fmt(v)}" for k, v in detail.items())
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def within(value, target, tol):
    return bool(abs(value - target) <= tol)


@pytest.fixture(scope="module")
def fig4():
    return fig4_table(GRID, GRID)


@pytest.fixture(scope="module")
def fig6():
    return fig6_table(GRID, GRID)


def test_c1_closed_forms_match_simulation():
    results = closed_form_checks(draws=200, seed=1, tol=1e-9)
    worst = max(r.detail["max_deviation"] for r in results)
    ok = all(r.passed for r in results)
    assert report(1, ok, pipelines=len(results), draws=200, max_deviation=worst, tol=1e-9)


def test_c2_mems_local_threshold():
    exact = 5 / 36 * (2 + np.sqrt(13))
    r = float(mems_threshold(np.array([0.5]), Mode.LOCAL, Group.DIAGONAL)[0])
    assert report(2, within(r, exact, 1e-4), r_star=r, exact=exact, tol=1e-4)


def test_c3_mems_nonlocal_minimum_concurrence():
    r, p = min_threshold_concurrence(Mode.NONLOCAL, Group.HORIZONTAL)
    assert report(3, within(r, 0.58, 0.01), r_min=r, at_p=p, target=0.58, tol=0.01)


def test_c4_local_asymmetry_cutoffs():
    table = fig2_table(GRID)
    p = table["p"]
    low_diag = float(p[table["local_diagonal_optimal"]].min())
    low_horz = float(p[table["local_horizontal_optimal"]].min())
    cut_diag = asymmetry_cutoff(Mode.LOCAL, Group.DIAGONAL)
    cut_horz = asymmetry_cutoff(Mode.LOCAL, Group.HORIZONTAL)
    ok = all([
        within(low_diag, 0.30, 0.02), within(low_horz, 0.44, 0.02),
        within(cut_diag, 0.30, 0.02), within(cut_horz, 0.44, 0.02),
    ])
    assert report(4, ok, grid_min_p_diagonal=low_diag, grid_min_p_horizontal=low_horz,
                  cutoff_diagonal=cut_diag, cutoff_horizontal=cut_horz, targets=(0.30, 0.44), tol=0.02)


def test_c5_mems_ii_local_never_broadcasts():
    r = mems_ii_local_check(GRID)
    assert report(5, r.passed, hits=r.detail["hits"], grid=r.detail["grid"])


def test_c6_discord_formulas_and_chains():
    results = discord_checks(n=101, tol=1e-10)
    worst = max(r.detail.get("max_deviation", 0.0) for r in results)
    chains = all(r.passed for r in results if "chain" in r.name)
    ok = all(r.passed for r in results)
    assert report(6, ok, points=101, max_deviation=worst, tol=1e-10, zero_chains=chains)


def test_c7_successive_nonlocal_ranges(fig4):
    n = GRID
    p1, p2, sigma = fig4["p1"], fig4["p2"], fig4["sigma"]
    passing = fig4["n_pass"] > 0
    k_lo = float(np.nanmin(fig4["k_low"]))
    k_hi = float(np.nanmax(fig4["k_high"]))
    box_p1 = (float(p1[passing].min()), float(p1[passing].max()))
    box_p2 = (float(p2[passing].min()), float(p2[passing].max()))
    best = int(np.nanargmax(sigma))
    grid_sigma = sigma.reshape(n, n)
    asym = np.nanmax(np.abs(grid_sigma - grid_sigma[:, ::-1]))
    same_mask = np.array_equal(np.isnan(grid_sigma), np.isnan(grid_sigma[:, ::-1]))
    parts = {
        "union": within(k_lo, 0.13, 0.01) and within(k_hi, 0.87, 0.01),
        "box_p1": within(box_p1[0], 0.48, 0.02) and within(box_p1[1], 0.67, 0.02),
        "box_p2": within(box_p2[0], 0.38, 0.02) and within(box_p2[1], 0.62, 0.02),
        "argmax": within(p1[best], 0.60, 0.03) and within(p2[best], 0.50, 0.02),
        "symmetric_p2": same_mask and asym <= 1.0 / (n - 1),
    }
    failed = ",".join(k for k, v in parts.items() if not v) or "none"
    assert report(7, all(parts.values()), k_union=(k_lo, k_hi), target=(0.13, 0.87), box_p1=box_p1,
                  box_p2=box_p2, argmax=(float(p1[best]), float(p2[best])), sigma_max=float(sigma[best]),
                  p2_asymmetry=float(asym), failed_parts=failed)


def test_c8_successive_local_impossible():
    r = successive_local_check(21, 21, 41)
    assert report(8, r.passed, hits=r.detail["hits"], grid=r.detail["grid"],
                  any_matching_optimal=r.detail["any_matching_optimal"])


def test_c9_direct_local_impossible():
    r = direct_local_check(21, 41)
    assert report(9, r.passed, hits=r.detail["hits"], settings=r.detail["settings"], nk=41,
                  any_matching_optimal=r.detail["any_matching_optimal"])


def test_c10_direct_nonlocal_ranges(fig6):
    step = 1.0 / (GRID - 1)
    beta, gamma, alpha, sigma = fig6["beta"], fig6["gamma"], fig6["alpha"], fig6["sigma"]
    passing = fig6["n_pass"] > 0
    k_lo = float(np.nanmin(fig6["k_low"]))
    k_hi = float(np.nanmax(fig6["k_high"]))
    best = int(np.nanargmax(sigma))
    sym = k_ranges(direct13(np.array([SYMMETRIC_D4]), np.array([SYMMETRIC_D4]),
                            np.array([SYMMETRIC_D4]), Mode.NONLOCAL), nk=GRID)
    sym_sigma = float(sym["sigma"][0])
    box_b = (float(beta[passing].min()), float(beta[passing].max()))
    box_g = (float(gamma[passing].min()), float(gamma[passing].max()))
    at_sym = all(abs(v[best] - SYMMETRIC_D4) <= step for v in (alpha, beta, gamma))
    parts = {
        "union": within(k_lo, 0.09, 0.01) and within(k_hi, 0.91, 0.01),
        "max_at_symmetric": at_sym and sym_sigma >= float(sigma[best]) - 1e-12,
        "box_beta": within(box_b[0], 0.3, 0.02) and within(box_b[1], 0.7, 0.02),
        "box_gamma": within(box_g[0], 0.3, 0.02) and within(box_g[1], 0.7, 0.02),
    }
    failed = ",".join(k for k, v in parts.items() if not v) or "none"
    assert report(10, all(parts.values()), k_union=(k_lo, k_hi), target=(0.09, 0.91),
                  argmax=(float(alpha[best]), float(beta[best]), float(gamma[best])),
                  sigma_grid=float(sigma[best]), sigma_symmetric=sym_sigma,
                  box_beta=box_b, box_gamma=box_g, failed_parts=failed)


def test_c11_reference_unitaries():
    ref = reference_unitaries()
    uw, ub = u4_from_params(ref["werner"]), u4_from_params(ref["bds"])
    dev_w = float(np.abs(uw - WERNER_MATRIX).max())
    dev_b = float(np.abs(ub - BDS_MATRIX).max())
    unit = max(float(np.abs(u.T @ u - np.eye(4)).max()) for u in (uw, ub))
    ok = dev_w <= 1e-3 and dev_b <= 1e-3 and unit <= 1e-10
    assert report(11, ok, werner_dev=dev_w, bds_dev=dev_b, tol=1e-3, unitarity=unit)


def test_c12_unitary_dominance():
    ref = reference_unitaries()
    dw = dominance(ref["werner"], family_grid("werner", 101))
    db = dominance(ref["bds"], family_grid("bds", 41))
    ok = all(d.cloner_only == 0 and d.unitary_only_fraction >= 0.01 for d in (dw, db))
    assert report(12, ok, werner=(dw.cloner_only, dw.unitary_only, dw.total),
                  bds=(db.cloner_only, db.unitary_only, db.total),
                  columns="(cloner_only,unitary_only,total)")


def _conjecture_probe(draws, seed):
    """Nonlocal 1->2 diagonal pairs on random mixed inputs; returns counterexamples."""
    rng = np.random.default_rng(seed)
    ranks = rng.integers(1, 5, draws)
    g = rng.normal(size=(draws, 4, 4)) + 1j * rng.normal(size=(draws, 4, 4))
    g = g * (np.arange(4) < ranks[:, None])[:, None, :]
    m = g @ np.swapaxes(g.conj(), -1, -2)
    m = m / np.trace(m, axis1=-2, axis2=-1).real[:, None, None]
    cs = [to_canonical(DensityOp(0.5 * (a + a.conj().T))) for a in m]
    states = StateGrid("general", {"index": np.arange(draws, dtype=float)},
                       np.array([c.x for c in cs]), np.array([c.y for c in cs]), np.array([c.T for c in cs]))
    mp = min_pt_zip(states, one_to_two(rng.uniform(size=draws), Mode.NONLOCAL), labels=("14", "23"))
    return int(((mp["14"] < -1e-9) & (mp["23"] < -1e-9)).sum()), int(((mp["14"] < -1e-9) | (mp["23"] < -1e-9)).sum())


def test_c13_property_suites():
    rng = np.random.default_rng(13)
    # symmetric limits against the universal shrink (m + d) / (m (d + 1))
    sym = Asym12(0.5)
    c2 = coeffs_13(*[1 / np.sqrt(6)] * 3, d=2)
    c4 = coeffs_13(*[SYMMETRIC_D4] * 3, d=4)
    limits = all([
        np.isclose(sym.p * sym.mu, 2 / 3), np.isclose(sym.kappa1, 3 / 5), np.isclose(sym.kappa2, 3 / 5),
        np.isclose(c2.A1, 5 / 9), np.isclose(c4.b1, 7 / 15), np.isclose(c4.b2, c4.b3),
    ])
    # isometry validity
    worst_iso = 0.0
    for _ in range(50):
        a = Asym12(float(rng.uniform()))
        isos = [local_cloner_isometry(a), nonlocal_cloner_isometry(a)]
        for d in (2, 4):
            al, be = rng.uniform(0, 0.7, 2)
            roots = solve_gamma(al, be, d)
            isos.append(direct13_isometry(Asym13(al, be, roots[0], d)))
        for v in isos:
            e = v.entries
            worst_iso = max(worst_iso, float(np.abs(e.conj().T @ e - np.eye(e.shape[1])).max()))
    # local-unitary invariance of the measures
    worst_lu = 0.0
    for _ in range(200):
        rho = random_state(rng)
        z = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
        u = np.kron(*(np.linalg.qr(z[i])[0] for i in range(2)))
        rot = DensityOp(u @ rho.matrix @ u.conj().T)
        worst_lu = max(
            worst_lu,
            abs(float(min_pt_eigenvalue(rot.matrix) - min_pt_eigenvalue(rho.matrix))),
            abs(concurrence(rot) - concurrence(rho)),
            abs(geometric_discord(rot).d_g - geometric_discord(rho).d_g),
        )
    both, either = _conjecture_probe(10_000, 1313)
    ok = limits and worst_iso <= 1e-12 and worst_lu <= 1e-7
    assert report(13, ok, symmetric_limits=limits, isometry_dev=worst_iso, local_unitary_dev=worst_lu,
                  conjecture_counterexamples=both, conjecture_single_pair_entangled=either, draws=10_000)
