"""Resource-state families: MEMS, NME, Werner-like, Bell-diagonal and general."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from qbroadcast.qcore import (
    CanonicalTwoQubit,
    DensityOp,
    InvalidStateError,
    from_canonical,
)

MEMS_SPLIT = 2.0 / 3.0


class Family(enum.Enum):
    GENERAL = "general"
    MEMS_I = "mems-i"
    MEMS_II = "mems-ii"
    NME = "nme"
    WERNER_LIKE = "werner"
    BELL_DIAGONAL = "bds"


class InvalidBellDiagonalError(InvalidStateError):
    """Some Bell-basis weight is negative; ``violated`` lists (u, v, weight)."""

    def __init__(self, violated: list[tuple[int, int, float]]):
        detail = ", ".join(f"lambda_{u}{v}={w:.6g}" for u, v, w in violated)
        super().__init__(f"not a Bell-diagonal state: {detail}", min(w for *_, w in violated))
        self.violated = violated


@dataclass(frozen=True)
class FamilyPoint:
    """A family label with its parameters.

    ``tags`` lists every family the point belongs to; the MEMS boundary
    point r = 2/3 carries both subclass tags.
    """

    family: Family
    params: dict = field(default_factory=dict)
    tags: tuple[Family, ...] = ()

    def state(self) -> DensityOp:
        return family_state(self)


def _check_unit(name: str, v: float):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name}={v} outside [0, 1]")


def mems_subclasses(r: float) -> tuple[Family, ...]:
    if r == MEMS_SPLIT:
        return (Family.MEMS_II, Family.MEMS_I)
    return (Family.MEMS_I,) if r > MEMS_SPLIT else (Family.MEMS_II,)


def mems_point(r: float) -> FamilyPoint:
    _check_unit("r", r)
    tags = mems_subclasses(r)
    return FamilyPoint(tags[0], {"r": float(r)}, tags)


def mems_canonical(r, subclass: Family | None = None):
    """Batched MEMS canonical data (x_z, y_z, T) with x=(0,0,x_z), y=(0,0,y_z).

    The subclass follows r unless forced; forcing gives the matrix formula
    outside its natural r range, which scans use for the MEMS-II sweep.
    """
    r = np.asarray(r, dtype=float)
    if subclass is None:
        first = r > MEMS_SPLIT
    else:
        first = np.full(r.shape, subclass is Family.MEMS_I)
    xz = np.where(first, 1.0 - r, 1.0 / 3.0)
    tz = np.where(first, 2.0 * r - 1.0, 1.0 / 3.0)
    T = np.zeros(r.shape + (3, 3))
    T[..., 0, 0] = r
    T[..., 1, 1] = -r
    T[..., 2, 2] = tz
    return xz, -xz, T


def mems_matrix(r: float, subclass: Family) -> np.ndarray:
    """Explicit MEMS density matrix of the requested subclass (unchecked)."""
    m = np.zeros((4, 4))
    if subclass is Family.MEMS_I:
        m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = r / 2
        m[1, 1] = 1 - r
    elif subclass is Family.MEMS_II:
        m[0, 0] = m[1, 1] = m[3, 3] = 1.0 / 3.0
        m[0, 3] = m[3, 0] = r / 2
    else:
        raise ValueError(f"{subclass} is not a MEMS subclass")
    return m


def mems(r: float) -> DensityOp:
    """MEMS with concurrence r; subclass II for r <= 2/3, subclass I above."""
    _check_unit("r", r)
    return DensityOp(mems_matrix(r, mems_subclasses(r)[0]))


def nme_ket(k: float) -> np.ndarray:
    return np.array([np.sqrt(k), 0.0, 0.0, np.sqrt(1.0 - k)])


def nme(k: float) -> DensityOp:
    """Pure state sqrt(k)|00> + sqrt(1-k)|11>."""
    _check_unit("k", k)
    v = nme_ket(k)
    return DensityOp(np.outer(v, v))


def nme_correlation(k) -> np.ndarray:
    """Batched correlation matrix diag(s, -s, 1), s = 2 sqrt(k(1-k))."""
    k = np.asarray(k, dtype=float)
    s = 2.0 * np.sqrt(k * (1.0 - k))
    T = np.zeros(k.shape + (3, 3))
    T[..., 0, 0] = s
    T[..., 1, 1] = -s
    T[..., 2, 2] = 1.0
    return T


def werner_canonical(p: float, k: float) -> CanonicalTwoQubit:
    s = 2.0 * p * np.sqrt(k * (1.0 - k))
    bloch = [0.0, 0.0, p * (2.0 * k - 1.0)]
    return CanonicalTwoQubit(bloch, bloch, np.diag([s, -s, p]))


def werner_like(p: float, k: float) -> DensityOp:
    """Mixture of nme(k) with weight p and white noise, built from its canonical triple."""
    _check_unit("p", p)
    _check_unit("k", k)
    return from_canonical(werner_canonical(p, k))


def bell_weights(c1, c2, c3) -> np.ndarray:
    """Bell-basis weights lambda_uv, batched; last axes are (u, v)."""
    c1, c2, c3 = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (c1, c2, c3)))
    out = np.empty(c1.shape + (2, 2))
    for u in (0, 1):
        for v in (0, 1):
            out[..., u, v] = 0.25 * (
                1 + (-1) ** u * c1 - (-1) ** (u + v) * c2 + (-1) ** v * c3
            )
    return out


def bell_state(u: int, v: int) -> np.ndarray:
    """Ket of the Bell state with index (u, v).

    (0,0) and (1,0) are the even-parity states, (0,1) and (1,1) the odd ones;
    u selects the relative sign.
    """
    ket = np.zeros(4)
    a, b = (0, 3) if v == 0 else (1, 2)
    ket[a] = 1.0
    ket[b] = -1.0 if u else 1.0
    return ket / np.sqrt(2.0)


def bell_diagonal(c1: float, c2: float, c3: float) -> DensityOp:
    """Bell-diagonal state with correlation matrix diag(c1, c2, c3)."""
    lam = bell_weights(c1, c2, c3)
    bad = [(u, v, float(lam[u, v])) for u in (0, 1) for v in (0, 1) if lam[u, v] < -1e-12]
    if bad:
        raise InvalidBellDiagonalError(bad)
    m = np.zeros((4, 4))
    for u in (0, 1):
        for v in (0, 1):
            g = bell_state(u, v)
            m += lam[u, v] * np.outer(g, g)
    return DensityOp(m)


def general_two_qubit(c: CanonicalTwoQubit) -> DensityOp:
    """Checked state from an arbitrary canonical triple."""
    return from_canonical(c)


def family_state(point: FamilyPoint) -> DensityOp:
    f, p = point.family, point.params
    if f in (Family.MEMS_I, Family.MEMS_II):
        return mems(p["r"])
    if f is Family.NME:
        return nme(p["k"])
    if f is Family.WERNER_LIKE:
        return werner_like(p["p"], p["k"])
    if f is Family.BELL_DIAGONAL:
        return bell_diagonal(p["c1"], p["c2"], p["c3"])
    return general_two_qubit(CanonicalTwoQubit(p["x"], p["y"], p["T"]))
