"""Grid scans, threshold searches and the tables behind each figure.

Scans evaluate closed forms by default and brute-force simulation when
``force_brute_force`` is set. Work is split into chunks that run on up to
QBROADCAST_THREADS threads; results are always assembled in grid order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from qbroadcast.cloners import Asym12, Asym13, SuccessiveParams, solve_gamma_batched
from qbroadcast.families import Family, bell_weights, mems_canonical, nme_correlation
from qbroadcast.measures import (
    ENTANGLEMENT_TOL,
    is_xstate,
    min_pt_eigenvalue,
    min_pt_eigenvalue_xstate,
)
from qbroadcast.qcore import CanonicalTwoQubit, canonical_matrix, from_canonical
from qbroadcast.pipelines.closed_forms import (
    Mode,
    as_mode,
    forms_1to2,
    forms_direct13,
    forms_successive,
)
from qbroadcast.pipelines.ensemble import (
    CROSS_1TO3,
    GROUP_PAIRS,
    LOCAL_1TO2,
    LOCAL_1TO3,
    NONLOCAL_1TO3,
    PAIRS_1TO2,
    Group,
    all_matchings,
)
from qbroadcast.pipelines.simulate import (
    broadcast_1to2_local,
    broadcast_1to2_nonlocal,
    direct13_broadcast,
    successive_broadcast,
)

THREADS_ENV = "QBROADCAST_THREADS"
DEFAULT_GRID = 201
BISECTION_STEPS = 50
_CHUNK_POINTS = 1 << 18


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items) -> list:
    """map() over worker threads; output order follows ``items``."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class StateGrid:
    """Flat list of input states in canonical form with their parameters."""

    family: str
    params: dict
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def __len__(self) -> int:
        return self.x.shape[0]

    def canonical(self, i: int) -> CanonicalTwoQubit:
        return CanonicalTwoQubit(self.x[i], self.y[i], self.T[i])


def _z(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape + (3,))
    out[..., 2] = v
    return out


def mems_grid(r, subclass: Family | None = None) -> StateGrid:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    xz, yz, T = mems_canonical(r, subclass)
    name = "mems" if subclass is None else subclass.value
    return StateGrid(name, {"r": r}, _z(xz), _z(yz), T)


def nme_grid(k) -> StateGrid:
    k = np.atleast_1d(np.asarray(k, dtype=float))
    K = 2.0 * k - 1.0
    return StateGrid("nme", {"k": k}, _z(K), _z(K), nme_correlation(k))


def werner_grid(p_values, k_values) -> StateGrid:
    """Outer product, p slow and k fast."""
    P, Kk = (a.ravel() for a in np.meshgrid(p_values, k_values, indexing="ij"))
    s = 2.0 * P * np.sqrt(Kk * (1.0 - Kk))
    T = np.zeros(P.shape + (3, 3))
    T[:, 0, 0], T[:, 1, 1], T[:, 2, 2] = s, -s, P
    bloch = _z(P * (2.0 * Kk - 1.0))
    return StateGrid("werner", {"p": P, "k": Kk}, bloch, bloch.copy(), T)


def bds_grid(n: int) -> StateGrid:
    """Points of an n^3 cube grid on [-1, 1]^3 that are valid Bell-diagonal states."""
    axis = np.linspace(-1.0, 1.0, n)
    c1, c2, c3 = (a.ravel() for a in np.meshgrid(axis, axis, axis, indexing="ij"))
    ok = (bell_weights(c1, c2, c3) >= -1e-12).all(axis=(-2, -1))
    c1, c2, c3 = c1[ok], c2[ok], c3[ok]
    T = np.zeros(c1.shape + (3, 3))
    T[:, 0, 0], T[:, 1, 1], T[:, 2, 2] = c1, c2, c3
    zero = np.zeros(c1.shape + (3,))
    return StateGrid("bds", {"c1": c1, "c2": c2, "c3": c3}, zero, zero.copy(), T)


def canonical_grid(states: list[CanonicalTwoQubit]) -> StateGrid:
    idx = np.arange(len(states), dtype=float)
    return StateGrid(
        "general",
        {"index": idx},
        np.array([c.x for c in states]),
        np.array([c.y for c in states]),
        np.array([c.T for c in states]),
    )


@dataclass(frozen=True, eq=False)
class StrategyGrid:
    """Flat list of cloner settings for one protocol."""

    protocol: str
    mode: Mode
    params: dict
    mirrored: bool = False

    def __len__(self) -> int:
        return len(next(iter(self.params.values())))

    @property
    def labels(self) -> tuple[str, ...]:
        if self.protocol == "1to2":
            return PAIRS_1TO2
        if self.mode is Mode.LOCAL:
            return NONLOCAL_1TO3 + LOCAL_1TO3 + CROSS_1TO3
        return NONLOCAL_1TO3 + LOCAL_1TO3

    def forms(self, sl=slice(None)):
        P = {k: v[sl] for k, v in self.params.items()}
        if self.protocol == "1to2":
            return forms_1to2(P["p"], self.mode)
        if self.protocol == "successive":
            return forms_successive(P["p1"], P["p2"], self.mode, self.mirrored)
        return forms_direct13(P["alpha"], P["beta"], P["gamma"], self.mode)

    def simulate(self, j: int, rho):
        P = {k: float(v[j]) for k, v in self.params.items()}
        if self.protocol == "1to2":
            a = Asym12(P["p"])
            if self.mode is Mode.LOCAL:
                return broadcast_1to2_local(rho, a)
            return broadcast_1to2_nonlocal(rho, a)
        if self.protocol == "successive":
            return successive_broadcast(
                rho, SuccessiveParams(P["p1"], P["p2"]), self.mode, self.mirrored
            )
        d = 2 if self.mode is Mode.LOCAL else 4
        return direct13_broadcast(rho, Asym13(P["alpha"], P["beta"], P["gamma"], d), self.mode)


def _flat(*arrays):
    return [np.atleast_1d(np.asarray(a, dtype=float)).ravel() for a in np.broadcast_arrays(*arrays)]


def one_to_two(p, mode) -> StrategyGrid:
    (p,) = _flat(p)
    return StrategyGrid("1to2", as_mode(mode), {"p": p})


def successive(p1, p2, mode, mirrored: bool = False) -> StrategyGrid:
    """Settings for the successive protocol; p1, p2 broadcast elementwise."""
    p1, p2 = _flat(p1, p2)
    return StrategyGrid("successive", as_mode(mode), {"p1": p1, "p2": p2}, mirrored)


def direct13(alpha, beta, gamma, mode) -> StrategyGrid:
    alpha, beta, gamma = _flat(alpha, beta, gamma)
    return StrategyGrid("direct13", as_mode(mode), {"alpha": alpha, "beta": beta, "gamma": gamma})


def direct13_from_pair(beta, gamma, mode) -> StrategyGrid:
    """Direct settings with alpha completed as the largest root (NaN if none)."""
    d = 2 if as_mode(mode) is Mode.LOCAL else 4
    beta, gamma = _flat(beta, gamma)
    return direct13(solve_gamma_batched(beta, gamma, d), beta, gamma, mode)


# ---------------------------------------------------------------- evaluation


def _eval_min_pt(forms, labels, x, y, T) -> dict[str, np.ndarray]:
    out = {}
    xstate = is_xstate(x, y, T)
    for lab in labels:
        f = forms[lab]
        src = {"x": x, "y": y}
        if xstate:
            az = f.a * src[f.a_src][..., 2]
            bz = f.b * src[f.b_src][..., 2]
            if f.t_kind == "T":
                diag = [f.t * T[..., i, i] for i in range(3)]
            else:
                diag = [f.t] * 3
            out[lab] = min_pt_eigenvalue_xstate(az, bz, *diag)
        else:
            xo, yo, to = f.evaluate(x, y, T)
            out[lab] = min_pt_eigenvalue(canonical_matrix(xo, yo, to))
    return out


def min_pt_outer(
    states: StateGrid,
    strategy: StrategyGrid,
    labels=None,
    force_brute_force: bool = False,
) -> dict[str, np.ndarray]:
    """Minimum PT eigenvalue of each pair on the (state, setting) product grid.

    Arrays have shape (len(states), len(strategy)).
    """
    labels = tuple(labels or strategy.labels)
    n, m = len(states), len(strategy)
    if force_brute_force:
        def row(i):
            rho = from_canonical(states.canonical(i))
            vals = {lab: np.empty(m) for lab in labels}
            for j in range(m):
                ens = strategy.simulate(j, rho)
                for lab in labels:
                    vals[lab][j] = min_pt_eigenvalue(ens[lab].matrix)
            return vals

        rows = ordered_map(row, range(n))
        return {lab: np.array([r[lab] for r in rows]).reshape(n, m) for lab in labels}

    forms = strategy.forms()
    step = max(1, _CHUNK_POINTS // max(m, 1))
    chunks = [slice(i, min(i + step, n)) for i in range(0, n, step)]

    def run(sl):
        return _eval_min_pt(
            forms, labels, states.x[sl, None, :], states.y[sl, None, :], states.T[sl, None, :, :]
        )

    parts = ordered_map(run, chunks)
    return {
        lab: np.concatenate([np.broadcast_to(p[lab], (c.stop - c.start, m)) for p, c in zip(parts, chunks)])
        for lab in labels
    }


def min_pt_zip(
    states: StateGrid, strategy: StrategyGrid, labels=None, force_brute_force: bool = False
) -> dict[str, np.ndarray]:
    """Like min_pt_outer but pairs state i with setting i."""
    labels = tuple(labels or strategy.labels)
    n = len(states)
    if len(strategy) != n:
        raise ValueError("zip evaluation needs equal-length grids")
    if force_brute_force:
        def one(i):
            ens = strategy.simulate(i, from_canonical(states.canonical(i)))
            return {lab: min_pt_eigenvalue(ens[lab].matrix) for lab in labels}

        rows = ordered_map(one, range(n))
        return {lab: np.array([r[lab] for r in rows]) for lab in labels}
    chunks = [slice(i, min(i + _CHUNK_POINTS, n)) for i in range(0, n, _CHUNK_POINTS)]

    def run(sl):
        return _eval_min_pt(strategy.forms(sl), labels, states.x[sl], states.y[sl], states.T[sl])

    parts = ordered_map(run, chunks)
    return {lab: np.concatenate([np.broadcast_to(p[lab], (c.stop - c.start,)) for p, c in zip(parts, chunks)]) for lab in labels}


def verdict_columns(min_pt: dict, protocol: str, tol: float = ENTANGLEMENT_TOL) -> dict[str, np.ndarray]:
    ent = {lab: v < -tol for lab, v in min_pt.items()}
    out = {}
    if protocol == "1to2":
        sep = ~(ent[LOCAL_1TO2[0]] | ent[LOCAL_1TO2[1]])
        out["locals_separable"] = sep
        for g in Group:
            a, b = GROUP_PAIRS[g]
            out[f"{g.value}_entangled"] = ent[a] & ent[b]
            out[f"{g.value}_optimal"] = ent[a] & ent[b] & sep
        return out
    nl = ent["12"] & ent["34"] & ent["56"]
    sep = ~np.logical_or.reduce([ent[lab] for lab in LOCAL_1TO3])
    out["nonlocal_entangled"] = nl
    out["locals_separable"] = sep
    out["optimal"] = nl & sep
    if all(lab in ent for lab in CROSS_1TO3):
        any_m = np.logical_or.reduce(
            [np.logical_and.reduce([ent[lab] for lab in m]) for m in all_matchings()]
        )
        out["any_matching_entangled"] = any_m
        out["any_matching_optimal"] = any_m & sep
    return out


@dataclass(frozen=True, eq=False)
class ScanTable:
    """Column-oriented scan result; row order is grid order."""

    columns: tuple[str, ...]
    data: dict
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.data[self.columns[0]]) if self.columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]


def _table(parts: list[dict], meta: dict) -> ScanTable:
    data = {}
    for p in parts:
        data.update({k: np.asarray(v) for k, v in p.items()})
    return ScanTable(tuple(data), data, meta)


def scan_range(
    states: StateGrid,
    strategy: StrategyGrid,
    tol: float = ENTANGLEMENT_TOL,
    force_brute_force: bool = False,
) -> ScanTable:
    """One row per (state, setting) pair, state index major.

    Columns: state parameters, cloner parameters, min PT eigenvalue per
    output pair and the verdict flags.
    """
    n, m = len(states), len(strategy)
    mp = min_pt_outer(states, strategy, force_brute_force=force_brute_force)
    cols_state = {k: np.repeat(v, m) for k, v in states.params.items()}
    cols_strat = {k: np.tile(v, n) for k, v in strategy.params.items()}
    cols_pt = {f"min_pt_{lab}": v.ravel() for lab, v in mp.items()}
    verdicts = {k: v.ravel() for k, v in verdict_columns(mp, strategy.protocol, tol).items()}
    meta = {
        "family": states.family,
        "protocol": strategy.protocol,
        "mode": strategy.mode.value,
        "mirrored": strategy.mirrored,
        "tol": tol,
        "brute_force": force_brute_force,
    }
    return _table([cols_state, cols_strat, cols_pt, verdicts], meta)


# ---------------------------------------------------------------- 1->2 MEMS


def _mems_optimal(r, p, mode, group: Group, tol, subclass=None, force_brute_force=False):
    r, p = _flat(r, p)
    states = mems_grid(r, subclass)
    mp = min_pt_zip(states, one_to_two(p, mode), force_brute_force=force_brute_force)
    return verdict_columns(mp, "1to2", tol)[f"{group.value}_optimal"]


def bisect_boundary(pred, lo, hi, steps: int = BISECTION_STEPS):
    """Vectorized bisection for points where pred(lo) is False and pred(hi) True.

    Returns the final ``hi``, the smallest value known to satisfy pred.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        ok = pred(mid)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def mems_threshold(p, mode, group: Group, tol: float = ENTANGLEMENT_TOL, steps: int = BISECTION_STEPS):
    """Smallest MEMS concurrence r that broadcasts optimally, per cloner p.

    Assumes the verdict flips once along r; NaN where r = 1 fails.
    """
    (p,) = _flat(p)
    top = _mems_optimal(np.ones_like(p), p, mode, group, tol)
    bottom = _mems_optimal(np.zeros_like(p), p, mode, group, tol)
    r = bisect_boundary(
        lambda rr: _mems_optimal(rr, p, mode, group, tol), np.zeros_like(p), np.ones_like(p), steps
    )
    r = np.where(bottom, 0.0, r)
    return np.where(top, r, np.nan)


def min_threshold_concurrence(
    mode, group: Group, n: int = DEFAULT_GRID, tol: float = ENTANGLEMENT_TOL
) -> tuple[float, float]:
    """Minimum over p of the MEMS threshold; returns (r_min, p_at_min).

    A coarse p grid is followed by a fine grid one coarse step either side.
    Both values are NaN when no p broadcasts at all.
    """
    p = np.linspace(0.0, 1.0, n)
    r = mems_threshold(p, mode, group, tol)
    if np.isnan(r).all():
        return float("nan"), float("nan")
    i = int(np.nanargmin(r))
    h = 1.0 / (n - 1)
    pf = np.linspace(max(0.0, p[i] - h), min(1.0, p[i] + h), n)
    rf = mems_threshold(pf, mode, group, tol)
    j = int(np.nanargmin(rf))
    return float(rf[j]), float(pf[j])


def asymmetry_cutoff(mode, group: Group, tol: float = ENTANGLEMENT_TOL, steps: int = BISECTION_STEPS) -> float:
    """Smallest p (on the p <= 1/2 side) for which a MEMS point broadcasts.

    Uses the r = 1 state, which has the widest reach; the grid tables give
    an independent cross-check.
    """
    def pred(p):
        return _mems_optimal(np.ones_like(p), p, mode, group, tol)

    if not pred(np.array([0.5]))[0]:
        return float("nan")
    if pred(np.array([0.0]))[0]:
        return 0.0
    return float(bisect_boundary(pred, [0.0], [0.5], steps)[0])


def fig2_table(n: int = DEFAULT_GRID, tol: float = ENTANGLEMENT_TOL, force_brute_force: bool = False) -> ScanTable:
    """MEMS concurrence r against cloner asymmetry p, local and nonlocal."""
    axis = np.linspace(0.0, 1.0, n)
    states = mems_grid(axis)
    parts = [
        {"r": np.repeat(axis, n), "p": np.tile(axis, n)},
        {"subclass": np.repeat(np.where(axis > 2.0 / 3.0, 1, 2), n)},
    ]
    for mode in Mode:
        mp = min_pt_outer(states, one_to_two(axis, mode), force_brute_force=force_brute_force)
        v = verdict_columns(mp, "1to2", tol)
        parts.append({f"{mode.value}_{k}": a.ravel() for k, a in v.items()})
        parts.append({f"{mode.value}_min_pt_{lab}": a.ravel() for lab, a in mp.items()})
    return _table(parts, {"figure": "fig2", "grid_n": n, "tol": tol, "brute_force": force_brute_force})


# ---------------------------------------------------------------- k ranges


def k_ranges(
    strategy: StrategyGrid,
    nk: int = DEFAULT_GRID,
    tol: float = ENTANGLEMENT_TOL,
    steps: int = BISECTION_STEPS,
    force_brute_force: bool = False,
    column: str = "optimal",
) -> dict[str, np.ndarray]:
    """Range of nme(k) inputs for which each 1->3 setting succeeds.

    The k grid finds the smallest and largest passing k; bisection then
    sharpens each edge against its failing neighbour. ``sigma`` is the
    half-width measured from k = 1/2 on the low side, NaN when nothing
    passes.
    """
    ks = np.linspace(0.0, 1.0, nk)
    mp = min_pt_outer(nme_grid(ks), strategy, force_brute_force=force_brute_force)
    ok = verdict_columns(mp, strategy.protocol, tol)[column]  # (nk, m)
    any_ok = ok.any(axis=0)
    i_lo = np.where(any_ok, ok.argmax(axis=0), 0)
    i_hi = np.where(any_ok, nk - 1 - ok[::-1].argmax(axis=0), 0)

    lo_edge = ks[i_lo].copy()
    need = any_ok & (i_lo > 0)
    if need.any() and steps:
        idx = np.flatnonzero(need)
        sub = _subset(strategy, idx)
        lo_edge[idx] = bisect_boundary(
            lambda k: _pred_sub(sub, k, tol, force_brute_force, column),
            ks[i_lo[idx] - 1], ks[i_lo[idx]], steps,
        )
    hi_edge = ks[i_hi].copy()
    need = any_ok & (i_hi < nk - 1)
    if need.any() and steps:
        idx = np.flatnonzero(need)
        sub = _subset(strategy, idx)
        # mirror so the passing side is "hi"
        hi_edge[idx] = 1.0 - bisect_boundary(
            lambda k: _pred_sub(sub, 1.0 - k, tol, force_brute_force, column),
            1.0 - ks[i_hi[idx] + 1], 1.0 - ks[i_hi[idx]], steps,
        )
    k_low = np.where(any_ok, lo_edge, np.nan)
    k_high = np.where(any_ok, hi_edge, np.nan)
    return {
        "k_low": k_low,
        "k_high": k_high,
        "sigma": 0.5 - k_low,
        "n_pass": ok.sum(axis=0),
    }


def _subset(strategy: StrategyGrid, idx) -> StrategyGrid:
    return StrategyGrid(
        strategy.protocol, strategy.mode, {k: v[idx] for k, v in strategy.params.items()}, strategy.mirrored
    )


def _pred_sub(sub: StrategyGrid, k, tol, force_brute_force, column):
    mp = min_pt_zip(nme_grid(k), sub, force_brute_force=force_brute_force)
    return verdict_columns(mp, sub.protocol, tol)[column]


def k_range_table(
    strategy: StrategyGrid,
    nk: int = DEFAULT_GRID,
    tol: float = ENTANGLEMENT_TOL,
    force_brute_force: bool = False,
    meta: dict | None = None,
) -> ScanTable:
    kr = k_ranges(strategy, nk, tol, force_brute_force=force_brute_force)
    m = {"protocol": strategy.protocol, "mode": strategy.mode.value, "nk": nk, "tol": tol,
         "brute_force": force_brute_force}
    m.update(meta or {})
    return _table([dict(strategy.params), kr], m)


def fig4_table(
    n: int = DEFAULT_GRID,
    nk: int = DEFAULT_GRID,
    tol: float = ENTANGLEMENT_TOL,
    mirrored: bool = False,
    force_brute_force: bool = False,
) -> ScanTable:
    """Successive nonlocal broadcast: k range per (p1, p2)."""
    axis = np.linspace(0.0, 1.0, n)
    P1, P2 = np.meshgrid(axis, axis, indexing="ij")
    strat = successive(P1.ravel(), P2.ravel(), Mode.NONLOCAL, mirrored)
    return k_range_table(strat, nk, tol, force_brute_force, {"figure": "fig4", "grid_n": n})


def fig6_table(
    n: int = DEFAULT_GRID,
    nk: int = DEFAULT_GRID,
    tol: float = ENTANGLEMENT_TOL,
    force_brute_force: bool = False,
) -> ScanTable:
    """Direct nonlocal broadcast: k range per (beta, gamma), alpha solved."""
    axis = np.linspace(0.0, 1.0, n)
    B, G = np.meshgrid(axis, axis, indexing="ij")
    strat = direct13_from_pair(B.ravel(), G.ravel(), Mode.NONLOCAL)
    if force_brute_force:
        keep = np.flatnonzero(~np.isnan(strat.params["alpha"]))
        strat = _subset(strat, keep)
    return k_range_table(strat, nk, tol, force_brute_force, {"figure": "fig6", "grid_n": n})
