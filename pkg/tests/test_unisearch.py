import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ginibre_state, states
from qbroadcast.families import bell_diagonal, werner_like
from qbroadcast.measures import is_entangled, min_pt_eigenvalue
from qbroadcast.qcore import DensityOp, partial_trace, tensor
from qbroadcast.pipelines.scans import StateGrid
from qbroadcast.unisearch import (
    SearchConfig,
    U4Params,
    broadcast_via_unitary,
    cloner_baseline,
    family_grid,
    pair_channels,
    random_search,
    range_fraction,
    range_record,
    reference_unitaries,
    u4_from_params,
)

ZERO = U4Params.from_angles(np.zeros(6))
angles = st.lists(st.floats(0, 2 * np.pi), min_size=6, max_size=6)

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


def test_zero_angles_give_unitary():
    u = u4_from_params(ZERO)
    assert np.allclose(u.T @ u, np.eye(4), atol=1e-10)
    assert u[0, 0] == 1


def test_pair_constraint_enforced():
    with pytest.raises(ValueError):
        U4Params(1, 0.1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0)


def test_reference_parameters():
    ref = reference_unitaries()
    assert ref["werner"].a == 1.0
    assert ref["werner"].n == pytest.approx(np.cos(9 * np.pi / 10))
    assert ref["bds"].m == pytest.approx(-1.0)


def test_reference_matrices():
    ref = reference_unitaries()
    assert np.abs(u4_from_params(ref["werner"]) - WERNER_MATRIX).max() < 1e-3
    assert np.abs(u4_from_params(ref["bds"]) - BDS_MATRIX).max() < 1e-3


def test_reference_angles_on_tenth_pi_lattice():
    for u in reference_unitaries().values():
        steps = u.angles() / (np.pi / 10)
        assert np.allclose(steps, np.round(steps), atol=1e-9)


def test_random_parameters_are_unitary():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(10_000):
        u = u4_from_params(U4Params.from_angles(rng.uniform(0, 2 * np.pi, 6)))
        worst = max(worst, np.abs(u.T @ u - np.eye(4)).max())
    assert worst < 1e-10


@given(angles)
def test_angle_round_trip(a):
    u = U4Params.from_angles(a)
    assert np.allclose(U4Params.from_angles(u.angles()).as_tuple(), u.as_tuple(), atol=1e-12)


def test_identity_unitary_gives_product_outputs():
    rho = ginibre_state(3)
    ens = broadcast_via_unitary(rho, np.eye(4))
    blank = DensityOp.basis("0")
    a, b = partial_trace(rho, [0]), partial_trace(rho, [1])
    assert ens["14"].allclose(tensor(a, blank))
    assert ens["23"].allclose(tensor(blank, b))
    assert not is_entangled(ens["14"])


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        broadcast_via_unitary(ginibre_state(1), 2 * np.eye(4))


def test_werner_reference_broadcasts_example_point():
    ens = broadcast_via_unitary(werner_like(1.0, 0.5), reference_unitaries()["werner"])
    assert is_entangled(ens["14"]) and is_entangled(ens["23"])


@given(states(), angles)
def test_channels_match_simulation(rho, a):
    u = U4Params.from_angles(a)
    ens = broadcast_via_unitary(rho, u)
    for lab, S in pair_channels(u).items():
        out = (S @ rho.matrix.reshape(16)).reshape(4, 4)
        assert np.allclose(out, ens[lab].matrix, atol=1e-12)


@given(angles, st.floats(0, 1), st.floats(0, 1))
def test_swap_symmetric_werner_gives_equal_spectra(a, p, k):
    ens = broadcast_via_unitary(werner_like(p, k), U4Params.from_angles(a))
    assert np.allclose(ens["14"].eigenvalues(), ens["23"].eigenvalues(), atol=1e-12)


@given(angles, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_swap_symmetric_bds_gives_equal_spectra(a, c1, c2, c3):
    try:
        rho = bell_diagonal(c1, c2, c3)
    except ValueError:
        return
    ens = broadcast_via_unitary(rho, U4Params.from_angles(a))
    assert np.allclose(ens["14"].eigenvalues(), ens["23"].eigenvalues(), atol=1e-12)


def test_identity_fraction_is_zero():
    assert range_fraction(np.eye(4), family_grid("werner", 21)) == 0.0


@pytest.mark.parametrize("family, n", [("werner", 41), ("bds", 21)])
def test_reference_beats_symmetric_cloner(family, n):
    grid = family_grid(family, n)
    u = reference_unitaries()[family]
    base = cloner_baseline(grid)["broadcast"]
    assert range_fraction(u, grid) > base.mean()


def test_range_record_matches_point_simulation():
    grid = family_grid("werner", 6)
    u = reference_unitaries()["werner"]
    rec = range_record(u, grid)
    for i in range(len(grid)):
        ens = broadcast_via_unitary(werner_like(grid.params["p"][i], grid.params["k"][i]), u)
        both = is_entangled(ens["14"]) and is_entangled(ens["23"])
        assert rec.broadcast[i] == both
        assert rec.min_pt["14"][i] == pytest.approx(float(min_pt_eigenvalue(ens["14"].matrix)), abs=1e-12)


def test_fraction_independent_of_grid_order():
    grid = family_grid("bds", 11)
    perm = np.random.default_rng(1).permutation(len(grid))
    shuffled = StateGrid(
        grid.family, {k: v[perm] for k, v in grid.params.items()}, grid.x[perm], grid.y[perm], grid.T[perm]
    )
    u = reference_unitaries()["bds"]
    assert range_fraction(u, shuffled) == range_fraction(u, grid)


def test_config_validation():
    grid = family_grid("werner", 5)
    with pytest.raises(ValueError):
        SearchConfig("werner", grid, restarts=0)


def test_single_raw_sample_is_reproducible():
    grid = family_grid("werner", 11)
    res = random_search(SearchConfig("werner", grid, seed=7, restarts=1, refine_steps=0))
    raw = U4Params.from_angles(np.random.default_rng(7).uniform(0, 2 * np.pi, 6))
    assert res.best_fraction == range_fraction(raw, grid)
    assert res.evaluations == 1


def test_search_is_deterministic():
    grid = family_grid("bds", 7)
    cfg = SearchConfig("bds", grid, seed=3, restarts=2, refine_steps=1)
    a, b = random_search(cfg), random_search(cfg)
    assert a.as_dict() == b.as_dict()
    assert a.best_fraction == max(a.history)
    assert a.best_fraction >= a.baseline_fraction


@pytest.mark.parametrize("family, n", [("werner", 21), ("bds", 11)])
def test_search_reaches_reference_floor(family, n):
    grid = family_grid(family, n)
    res = random_search(SearchConfig(family, grid, seed=0))
    assert res.best_fraction >= 0.95 * range_fraction(reference_unitaries()[family], grid)
