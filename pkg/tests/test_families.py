import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qbroadcast.families import (
    MEMS_SPLIT,
    Family,
    FamilyPoint,
    InvalidBellDiagonalError,
    bell_diagonal,
    bell_state,
    bell_weights,
    mems,
    mems_matrix,
    mems_subclasses,
    nme,
    werner_like,
)
from qbroadcast.measures import concurrence, is_entangled
from qbroadcast.qcore import DensityOp, to_canonical

PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_mems_high_concurrence_matrix():
    m = mems(0.8).matrix.real
    assert np.allclose(np.diag(m), [0.4, 0.2, 0.0, 0.4])
    assert m[0, 3] == pytest.approx(0.4)


def test_mems_low_concurrence_matrix():
    m = mems(0.5).matrix.real
    assert np.allclose(np.diag(m), [1 / 3, 1 / 3, 0, 1 / 3])
    assert m[0, 3] == pytest.approx(0.25)


@pytest.mark.parametrize("r", [0.0, 0.3, 2 / 3, 0.7, 0.8, 1.0])
def test_mems_concurrence_equals_r(r):
    assert concurrence(mems(r)) == pytest.approx(r, abs=1e-9)


def test_mems_split_point_is_in_both_subclasses():
    assert set(mems_subclasses(MEMS_SPLIT)) == {Family.MEMS_I, Family.MEMS_II}
    a = mems_matrix(MEMS_SPLIT, Family.MEMS_I)
    b = mems_matrix(MEMS_SPLIT, Family.MEMS_II)
    assert np.allclose(a, b)


def test_mems_rejects_out_of_range():
    with pytest.raises(ValueError):
        mems(1.2)


def test_nme_half_is_bell_state():
    assert nme(0.5).allclose(DensityOp.from_ket(PHI_PLUS))


@pytest.mark.parametrize("k", [0.0, 1.0])
def test_nme_endpoints_are_product(k):
    assert not is_entangled(nme(k))


@given(st.floats(0, 1))
def test_werner_like_endpoints(k):
    assert werner_like(1.0, k).allclose(nme(k), atol=1e-12)
    assert werner_like(0.0, k).allclose(DensityOp.maximally_mixed(2))


def test_werner_like_canonical():
    c = to_canonical(werner_like(0.6, 0.3))
    s = 2 * 0.6 * np.sqrt(0.3 * 0.7)
    assert np.allclose(c.T, np.diag([s, -s, 0.6]))
    assert np.allclose(c.x, [0, 0, 0.6 * (2 * 0.3 - 1)])


def test_bell_states_orthonormal():
    kets = np.array([bell_state(u, v) for u in (0, 1) for v in (0, 1)])
    assert np.allclose(kets @ kets.T, np.eye(4))
    assert np.allclose(bell_state(0, 0), PHI_PLUS)


def test_bell_diagonal_corners():
    assert bell_diagonal(1, -1, 1).allclose(DensityOp.from_ket(PHI_PLUS))
    assert bell_diagonal(0, 0, 0).allclose(DensityOp.maximally_mixed(2))


def test_bell_diagonal_rejection_names_weights():
    with pytest.raises(InvalidBellDiagonalError) as err:
        bell_diagonal(0.9, 0.9, 0.9)
    assert "lambda_11" in str(err.value)
    assert err.value.violated[0][:2] == (1, 1)


def test_family_point_builds_state():
    p = FamilyPoint(Family.WERNER_LIKE, {"p": 0.5, "k": 0.5})
    assert p.state().allclose(werner_like(0.5, 0.5))


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bell_weights_sum_to_one_and_match_state(c1, c2, c3):
    lam = bell_weights(c1, c2, c3)
    assert lam.sum() == pytest.approx(1.0)
    if (lam >= 0).all():
        c = to_canonical(bell_diagonal(c1, c2, c3))
        assert np.allclose(c.T, np.diag([c1, c2, c3]), atol=1e-12)
        assert np.allclose(c.x, 0, atol=1e-12)
