"""Ancilla-free broadcasting with an arbitrary real 4x4 unitary.

The same unitary acts on wires (1, 3) and on wires (2, 4), with wires 3
and 4 starting in |0>. Only the blank input column pair of the unitary
matters, so each side is applied as a 2 -> 4 isometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qbroadcast.measures import ENTANGLEMENT_TOL, min_pt_eigenvalue
from qbroadcast.qcore import DensityOp, Isometry, apply_isometry, canonical_matrix, partial_trace
from qbroadcast.pipelines.closed_forms import Mode
from qbroadcast.pipelines.ensemble import OutputEnsemble, pair_wires
from qbroadcast.pipelines.scans import (
    ScanTable,
    StateGrid,
    bds_grid,
    min_pt_outer,
    one_to_two,
    ordered_map,
    werner_grid,
)

PAIR_TOL = 1e-12
UNITARY_TOL = 1e-10
UNITARY_PAIRS = ("14", "23", "13", "24")
ANGLE_NAMES = ("ab", "cd", "ef", "gh", "jl", "mn")
COARSE_STEP = np.pi / 10
FINE_STEP = np.pi / 100


@dataclass(frozen=True)
class U4Params:
    """Twelve real entries; (a, b), (c, d), ... (m, n) are unit pairs."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float
    h: float
    j: float
    l: float  # noqa: E741
    m: float
    n: float

    def __post_init__(self):
        v = self.as_tuple()
        for name, (x, y) in zip(ANGLE_NAMES, zip(v[::2], v[1::2])):
            dev = abs(x * x + y * y - 1.0)
            if dev > PAIR_TOL:
                raise ValueError(f"pair {name} has squared norm off by {dev:.3e}")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f,
                self.g, self.h, self.j, self.l, self.m, self.n)

    @classmethod
    def from_angles(cls, angles) -> U4Params:
        """Six angles; each pair is (cos t, sin t)."""
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (6,):
            raise ValueError("expected six angles")
        vals = []
        for t in angles:
            vals += [float(np.cos(t)), float(np.sin(t))]
        return cls(*vals)

    def angles(self) -> np.ndarray:
        """Angles in [0, 2 pi) reproducing the pairs."""
        v = self.as_tuple()
        return np.mod(np.arctan2(v[1::2], v[::2]), 2.0 * np.pi)

    def as_dict(self) -> dict:
        names = "a b c d e f g h j l m n".split()
        return dict(zip(names, self.as_tuple()))


def u4_from_params(u: U4Params) -> np.ndarray:
    a, b, c, d, e, f, g, h, j, l, m, n = u.as_tuple()  # noqa: E741
    U = np.array([
        [a, b * c, b * d * e, b * d * f],
        [b * g,
         -a * c * g + d * h * m,
         -a * d * e * g - c * e * h * m + f * h * n,
         -a * d * f * g - c * f * h * m - e * h * n],
        [b * h * j,
         -a * c * h * j - d * g * j * m + d * l * n,
         -a * d * e * h * j + c * e * g * j * m - c * e * l * n - f * g * j * n - f * l * m,
         -a * d * f * h * j + c * f * g * j * m - c * f * l * n + e * g * j * n + e * l * m],
        [b * h * l,
         -a * c * h * l - d * g * l * m - d * j * n,
         -a * d * e * h * l + c * e * g * l * m + c * e * j * n - f * g * l * n + f * j * m,
         -a * d * f * h * l + c * f * g * l * m + c * f * j * n + e * g * l * n - e * j * m],
    ])
    dev = np.abs(U.T @ U - np.eye(4)).max()
    if dev > UNITARY_TOL:
        raise ValueError(f"parameters give a non-unitary matrix (deviation {dev:.3e})")
    return U


def reference_unitaries() -> dict[str, U4Params]:
    """The published optimal settings for Werner-like and Bell-diagonal inputs."""
    pi = np.pi
    werner = np.cos([0, pi / 2, pi / 5, 3 * pi / 10, 2 * pi / 5, pi / 10,
                     2 * pi / 5, pi / 10, 0, pi / 2, 2 * pi / 5, 9 * pi / 10])
    bds = np.cos([pi / 5, 7 * pi / 10, 3 * pi / 5, 9 * pi / 10, 4 * pi / 5, 3 * pi / 10,
                  2 * pi / 5, 9 * pi / 10, 0, pi / 2, pi, pi / 2])
    return {"werner": U4Params(*werner), "bds": U4Params(*bds)}


def _check_unitary(u) -> np.ndarray:
    U = u4_from_params(u) if isinstance(u, U4Params) else np.asarray(u, dtype=complex)
    if U.shape != (4, 4):
        raise ValueError("expected a 4x4 unitary")
    dev = np.abs(U.conj().T @ U - np.eye(4)).max()
    if dev > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (deviation {dev:.3e})")
    return U


def blank_isometry(u) -> Isometry:
    """Columns of U with the partner wire in |0>: basis index 2*q_in + q_blank."""
    U = _check_unitary(u)
    return Isometry(U[:, [0, 2]])


def broadcast_via_unitary(rho12: DensityOp, u) -> OutputEnsemble:
    """Brute-force four-wire simulation; returns pairs 14, 23, 13, 24."""
    v = blank_isometry(u)
    state = apply_isometry(rho12, v, [0])
    state = apply_isometry(state, v, [1])
    pairs = {lab: partial_trace(state, [w - 1 for w in pair_wires(lab)]) for lab in UNITARY_PAIRS}
    return OutputEnsemble(pairs, {"strategy": "unitary"})


_PAIR_SUBSCRIPTS = {
    # full output indices (o1, o3, o2, o4, p1, p3, p2, p4)
    "14": "...abcdebch->...adeh",
    "23": "...abcdafgd->...bcfg",
    "13": "...abcdefcd->...abef",
    "24": "...abcdabgh->...cdgh",
}


def _pairs_raw(m: np.ndarray, V: np.ndarray) -> dict[str, np.ndarray]:
    """Output pairs of a (batched, unvalidated) 4x4 input matrix."""
    W = np.kron(V, V)
    R = (W @ m @ W.conj().T).reshape(m.shape[:-2] + (2,) * 8)
    return {lab: np.einsum(sub, R).reshape(m.shape) for lab, sub in _PAIR_SUBSCRIPTS.items()}


def pair_channels(u) -> dict[str, np.ndarray]:
    """Linear maps from the input matrix to each output pair, as 16x16 arrays.

    Convention: out.reshape(16) = S @ rho.reshape(16).
    """
    V = blank_isometry(u).entries
    basis = np.eye(16, dtype=complex).reshape(16, 4, 4)
    outs = _pairs_raw(basis, V)
    return {lab: o.reshape(16, 16).T for lab, o in outs.items()}


def _apply_channels(channels, matrices) -> dict[str, np.ndarray]:
    flat = matrices.reshape(matrices.shape[:-2] + (16,))
    return {lab: (flat @ S.T).reshape(matrices.shape) for lab, S in channels.items()}


def unitary_min_pt(u, states: StateGrid, labels=UNITARY_PAIRS) -> dict[str, np.ndarray]:
    channels = {lab: S for lab, S in pair_channels(u).items() if lab in labels}
    mats = canonical_matrix(states.x, states.y, states.T)
    n = len(states)
    step = 1 << 16
    chunks = [slice(i, min(i + step, n)) for i in range(0, n, step)]

    def run(sl):
        outs = _apply_channels(channels, mats[sl])
        return {lab: min_pt_eigenvalue(m) for lab, m in outs.items()}

    parts = ordered_map(run, chunks)
    return {lab: np.concatenate([p[lab] for p in parts]) for lab in channels}


@dataclass(frozen=True, eq=False)
class RangeRecord:
    """Per-point outcome of broadcasting a grid with one unitary."""

    broadcast: np.ndarray
    local_entangled: np.ndarray
    min_pt: dict

    @property
    def fraction(self) -> float:
        return float(self.broadcast.mean()) if self.broadcast.size else 0.0

    @property
    def local_entangled_fraction(self) -> float:
        return float(self.local_entangled.mean()) if self.local_entangled.size else 0.0


def range_record(u, states: StateGrid, tol: float = ENTANGLEMENT_TOL) -> RangeRecord:
    """Both diagonal pairs entangled counts as broadcast; local pairs are only tallied."""
    mp = unitary_min_pt(u, states)
    ok = (mp["14"] < -tol) & (mp["23"] < -tol)
    loc = (mp["13"] < -tol) | (mp["24"] < -tol)
    return RangeRecord(ok, loc, mp)


def range_fraction(u, states: StateGrid, tol: float = ENTANGLEMENT_TOL) -> float:
    return range_record(u, states, tol).fraction


def cloner_baseline(states: StateGrid, tol: float = ENTANGLEMENT_TOL) -> dict[str, np.ndarray]:
    """Symmetric local cloner (p = 1/2) on the same grid.

    ``broadcast`` uses the same rule as the unitary (both diagonal pairs
    entangled); ``optimal`` also requires separable local pairs.
    """
    mp = min_pt_outer(states, one_to_two([0.5], Mode.LOCAL))
    ent = {lab: v[:, 0] < -tol for lab, v in mp.items()}
    diag = ent["14"] & ent["23"]
    sep = ~(ent["13"] | ent["24"])
    return {"broadcast": diag, "optimal": diag & sep, "min_pt": {k: v[:, 0] for k, v in mp.items()}}


@dataclass(frozen=True)
class Dominance:
    total: int
    unitary: int
    cloner: int
    cloner_only: int
    unitary_only: int

    @property
    def strict_superset(self) -> bool:
        return self.cloner_only == 0 and self.unitary_only > 0

    @property
    def unitary_only_fraction(self) -> float:
        return self.unitary_only / self.total if self.total else 0.0


def dominance(u, states: StateGrid, tol: float = ENTANGLEMENT_TOL) -> Dominance:
    uni = range_record(u, states, tol).broadcast
    clo = cloner_baseline(states, tol)["broadcast"]
    return Dominance(
        len(states), int(uni.sum()), int(clo.sum()), int((clo & ~uni).sum()), int((uni & ~clo).sum())
    )


def unitary_table(u, states: StateGrid, tol: float = ENTANGLEMENT_TOL, meta: dict | None = None) -> ScanTable:
    """Per-point comparison of a unitary with the symmetric cloner."""
    rec = range_record(u, states, tol)
    base = cloner_baseline(states, tol)
    data = {k: np.asarray(v) for k, v in states.params.items()}
    data["unitary_broadcast"] = rec.broadcast
    data["unitary_local_entangled"] = rec.local_entangled
    data["cloner_broadcast"] = base["broadcast"]
    data["cloner_optimal"] = base["optimal"]
    for lab, v in rec.min_pt.items():
        data[f"unitary_min_pt_{lab}"] = v
    for lab in ("14", "23", "13", "24"):
        data[f"cloner_min_pt_{lab}"] = base["min_pt"][lab]
    m = {"family": states.family, "tol": tol}
    m.update(meta or {})
    return ScanTable(tuple(data), data, m)


def family_grid(family: str, n: int) -> StateGrid:
    if family == "werner":
        axis = np.linspace(0.0, 1.0, n)
        return werner_grid(axis, axis)
    if family == "bds":
        return bds_grid(n)
    raise ValueError(f"unknown family {family!r}; use 'werner' or 'bds'")


# ---------------------------------------------------------------- search


@dataclass(frozen=True, eq=False)
class SearchConfig:
    family: str
    grid: StateGrid
    seed: int = 0
    restarts: int = 4
    refine_steps: int = 1
    tol: float = ENTANGLEMENT_TOL

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if len(self.grid) == 0:
            raise ValueError("grid is empty")
        if self.refine_steps < 0:
            raise ValueError("refine_steps must be non-negative")


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_params: U4Params
    best_fraction: float
    baseline_fraction: float
    history: list
    best_restart: int
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "best_params": self.best_params.as_dict(),
            "best_angles": [float(t) for t in self.best_params.angles()],
            "best_fraction": self.best_fraction,
            "baseline_fraction": self.baseline_fraction,
            "history": list(self.history),
            "best_restart": self.best_restart,
            "evaluations": self.evaluations,
        }


def _sweep(angles, best, score, offsets, refine_steps):
    """Coordinate sweep; a candidate replaces the incumbent only if strictly better."""
    count = 0
    for _ in range(refine_steps):
        improved = False
        for i in range(6):
            base = angles[i]
            for off in offsets:
                trial = angles.copy()
                trial[i] = np.mod(base + off, 2.0 * np.pi)
                f = score(trial)
                count += 1
                if f > best:
                    best, angles, improved = f, trial, True
        if not improved:
            break
    return angles, best, count


def _one_restart(cfg: SearchConfig, index: int):
    rng = np.random.default_rng(cfg.seed + index)
    angles = rng.uniform(0.0, 2.0 * np.pi, 6)

    def score(a):
        return range_fraction(U4Params.from_angles(a), cfg.grid, cfg.tol)

    best = score(angles)
    evals = 1
    coarse = COARSE_STEP * np.arange(1, 20)
    fine = FINE_STEP * np.concatenate([np.arange(-10, 0), np.arange(1, 11)])
    angles, best, c1 = _sweep(angles, best, score, coarse, cfg.refine_steps)
    angles, best, c2 = _sweep(angles, best, score, fine, cfg.refine_steps)
    return angles, best, evals + c1 + c2


def random_search(cfg: SearchConfig) -> SearchResult:
    """Seeded random restarts with a two-stage coordinate sweep.

    Restart i draws six uniform angles from a generator seeded with
    seed + i, then sweeps each angle over the pi/10 lattice and afterwards
    over +-10 steps of pi/100. The best restart wins, lowest index on ties.
    """
    runs = ordered_map(lambda i: _one_restart(cfg, i), range(cfg.restarts))
    history = [float(b) for _, b, _ in runs]
    best_i = int(np.argmax(history))
    base = float(cloner_baseline(cfg.grid, cfg.tol)["broadcast"].mean())
    return SearchResult(
        U4Params.from_angles(runs[best_i][0]),
        history[best_i],
        base,
        history,
        best_i,
        int(sum(e for *_, e in runs)),
    )
