"""Verification suites shared by the command line and the test suite."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qbroadcast.cloners import Asym12, Asym13, SuccessiveParams
from qbroadcast.families import MEMS_SPLIT, Family
from qbroadcast.measures import ENTANGLEMENT_TOL
from qbroadcast.qcore import DensityOp, to_canonical
from qbroadcast.pipelines.audits import discord_audit_1to2, separability_bound_report
from qbroadcast.pipelines.closed_forms import (
    Mode,
    closed_form_1to2,
    closed_form_direct13,
    closed_form_successive,
)
from qbroadcast.pipelines.ensemble import Group
from qbroadcast.pipelines.scans import (
    direct13,
    mems_grid,
    min_pt_outer,
    nme_grid,
    one_to_two,
    successive,
    verdict_columns,
)
from qbroadcast.pipelines.simulate import (
    broadcast_1to2_local,
    broadcast_1to2_nonlocal,
    direct13_broadcast,
    successive_broadcast,
)

ORACLE_TOL = 1e-9
DISCORD_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        extras = " ".join(f"{k}={_short(v)}" for k, v in self.detail.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {extras}".rstrip()

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def random_state(rng: np.random.Generator) -> DensityOp:
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityOp(0.5 * (m + m.conj().T))


def random_asym13(rng: np.random.Generator, d: int) -> Asym13:
    """Uniform (alpha, beta) in [-1, 1]^2 with a random real root for gamma."""
    s = 2.0 / d
    while True:
        a, b = rng.uniform(-1.0, 1.0, 2)
        lin = s * (a + b)
        c = a * a + b * b + s * a * b - 1.0
        disc = lin * lin - 4.0 * c
        if disc >= 0.0:
            g = (-lin + (1 if rng.integers(2) else -1) * np.sqrt(disc)) / 2.0
            return Asym13(float(a), float(b), float(g), d)


def _deviation(sim, closed) -> float:
    return max(sim.canonical(lab).max_deviation(closed.canonical(lab)) for lab in closed.pairs)


def closed_form_checks(draws: int = 200, seed: int = 0, tol: float = ORACLE_TOL) -> list[CheckResult]:
    """Closed forms against brute-force isometry simulation on random mixed inputs."""
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}

    def record(name, d):
        worst[name] = max(worst.get(name, 0.0), d)

    for _ in range(draws):
        rho = random_state(rng)
        c = to_canonical(rho)
        a = Asym12(float(rng.uniform()))
        record("1to2_local", _deviation(broadcast_1to2_local(rho, a), closed_form_1to2(c, a, Mode.LOCAL)))
        record("1to2_nonlocal", _deviation(broadcast_1to2_nonlocal(rho, a), closed_form_1to2(c, a, Mode.NONLOCAL)))
        sp = SuccessiveParams(*(float(v) for v in rng.uniform(size=2)))
        for mode in Mode:
            for mirrored in (False, True):
                sim = successive_broadcast(rho, sp, mode, mirrored)
                cf = closed_form_successive(c, sp, mode, mirrored)
                tag = "_mirrored" if mirrored else ""
                record(f"successive_{mode.value}{tag}", _deviation(sim, cf))
        for mode, d in ((Mode.LOCAL, 2), (Mode.NONLOCAL, 4)):
            w = random_asym13(rng, d)
            record(f"direct13_{mode.value}", _deviation(direct13_broadcast(rho, w, mode), closed_form_direct13(c, w, mode)))
    return [
        CheckResult(f"closed_form_{name}", dev <= tol, {"max_deviation": dev, "draws": draws})
        for name, dev in worst.items()
    ]


def mems_ii_local_check(n: int = 201, tol: float = ENTANGLEMENT_TOL) -> CheckResult:
    """Local cloners never broadcast a subclass-II MEMS, in either group.

    Subclass II is a valid state only for r <= 2/3, so r spans [0, 2/3].
    """
    r = np.linspace(0.0, MEMS_SPLIT, n)
    mp = min_pt_outer(mems_grid(r, Family.MEMS_II), one_to_two(np.linspace(0.0, 1.0, n), Mode.LOCAL))
    v = verdict_columns(mp, "1to2", tol)
    hits = int(sum(v[f"{g.value}_optimal"].sum() for g in Group))
    return CheckResult("mems_ii_local_impossible", hits == 0, {"hits": hits, "grid": f"{n}x{n}"})


def successive_local_check(np1: int = 21, np2: int = 21, nk: int = 41, tol: float = ENTANGLEMENT_TOL) -> CheckResult:
    """Successive local broadcast never leaves 12, 34 and 56 all entangled."""
    p = np.linspace(0.0, 1.0, np1)
    q = np.linspace(0.0, 1.0, np2)
    P1, P2 = (a.ravel() for a in np.meshgrid(p, q, indexing="ij"))
    hits = 0
    any_matching = 0
    for mirrored in (False, True):
        mp = min_pt_outer(nme_grid(np.linspace(0.0, 1.0, nk)), successive(P1, P2, Mode.LOCAL, mirrored))
        v = verdict_columns(mp, "successive", tol)
        hits += int(v["nonlocal_entangled"].sum())
        any_matching += int(v["any_matching_optimal"].sum())
    return CheckResult(
        "successive_local_impossible",
        hits == 0,
        {"hits": hits, "any_matching_optimal": any_matching, "grid": f"{np1}x{np2}x{nk}"},
    )


def _direct_local_grid(n: int):
    """Every real (alpha, beta, gamma) with alpha, beta on an n x n grid, both roots."""
    a = np.linspace(-1.0, 1.0, n)
    A, B = (v.ravel() for v in np.meshgrid(a, a, indexing="ij"))
    lin = A + B
    disc = lin * lin - 4.0 * (A * A + B * B + A * B - 1.0)
    ok = disc >= 0.0
    A, B, root = A[ok], B[ok], np.sqrt(disc[ok])
    alpha = np.concatenate([A, A])
    beta = np.concatenate([B, B])
    gamma = np.concatenate([(-A - B + root) / 2.0, (-A - B - root) / 2.0])
    return alpha, beta, gamma


def direct_local_check(n: int = 21, nk: int = 41, tol: float = ENTANGLEMENT_TOL) -> CheckResult:
    """Direct local 1->3 cloning never broadcasts optimally."""
    alpha, beta, gamma = _direct_local_grid(n)
    mp = min_pt_outer(nme_grid(np.linspace(0.0, 1.0, nk)), direct13(alpha, beta, gamma, Mode.LOCAL))
    v = verdict_columns(mp, "direct13", tol)
    hits = int(v["optimal"].sum())
    return CheckResult(
        "direct13_local_impossible",
        hits == 0,
        {"hits": hits, "any_matching_optimal": int(v["any_matching_optimal"].sum()),
         "settings": len(alpha), "nk": nk},
    )


def separability_bound_checks(draws: int = 200, seed: int = 0, tol: float = ENTANGLEMENT_TOL) -> list[CheckResult]:
    """Bloch-length bound against the eigenvalue verdict for the local pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for mode in Mode:
        bad = 0
        for _ in range(draws):
            c = to_canonical(random_state(rng))
            if not separability_bound_report(c, Asym12(float(rng.uniform())), mode, tol).agrees:
                bad += 1
        out.append(CheckResult(f"local_bound_{mode.value}", bad == 0, {"disagreements": bad, "draws": draws}))
    return out


def theorem_checks(grid_n: int = 201, tol: float = ENTANGLEMENT_TOL, seed: int = 0) -> list[CheckResult]:
    return [
        mems_ii_local_check(grid_n, tol),
        successive_local_check(tol=tol),
        direct_local_check(tol=tol),
        *separability_bound_checks(seed=seed, tol=tol),
    ]


def discord_checks(n: int = 101, tol: float = DISCORD_TOL, seed: int = 0) -> list[CheckResult]:
    """Simulated local-pair discord against its closed form, plus the zero-discord chain."""
    rng = np.random.default_rng(seed)
    sample = to_canonical(random_state(rng))
    out = []
    for mode in Mode:
        worst = 0.0
        chain = True
        for p in np.linspace(0.0, 1.0, n):
            audit = discord_audit_1to2(Asym12(float(p)), mode, sample)
            worst = max(worst, abs(audit.d13 - audit.formula), abs(audit.d24 - audit.formula))
            chain = chain and audit.implication_holds()
        out.append(CheckResult(f"discord_formula_{mode.value}", worst <= tol, {"max_deviation": worst, "points": n}))
        out.append(CheckResult(f"discord_zero_chain_{mode.value}", chain, {}))
    return out

