"""Separability bounds and geometric-discord audits for 1->2 broadcasting."""

from __future__ import annotations

from dataclasses import dataclass

from qbroadcast.cloners import Asym12
from qbroadcast.measures import ENTANGLEMENT_TOL, geometric_discord, is_entangled
from qbroadcast.qcore import CanonicalTwoQubit, from_canonical
from qbroadcast.pipelines.closed_forms import Mode, as_mode, closed_form_1to2
from qbroadcast.pipelines.ensemble import GROUP_PAIRS, Group
from qbroadcast.pipelines.simulate import broadcast_1to2_local, broadcast_1to2_nonlocal


def local_output_bound(a: Asym12, mode) -> float:
    """Largest squared Bloch length for which clones 13 (and 24) stay separable."""
    if as_mode(mode) is Mode.LOCAL:
        return 1.0 - 4.0 * a.pq**2
    return (1.0 - 2.0 * a.pq) / (1.0 - a.pq) ** 2


@dataclass(frozen=True)
class BoundCheck:
    bound: float
    x_within: bool
    y_within: bool
    sep_13: bool
    sep_24: bool

    @property
    def agrees(self) -> bool:
        return self.x_within == self.sep_13 and self.y_within == self.sep_24


def separability_bound_report(
    c: CanonicalTwoQubit, a: Asym12, mode, tol: float = ENTANGLEMENT_TOL
) -> BoundCheck:
    ens = closed_form_1to2(c, a, mode)
    b = local_output_bound(a, mode)
    return BoundCheck(
        b,
        bool(c.x @ c.x <= b),
        bool(c.y @ c.y <= b),
        not is_entangled(ens["13"], tol),
        not is_entangled(ens["24"], tol),
    )


def separability_bound_check(c: CanonicalTwoQubit, a: Asym12, mode, tol: float = ENTANGLEMENT_TOL) -> bool:
    """Does the Bloch-length bound predict the PH verdict on 13 and 24?"""
    return separability_bound_report(c, a, mode, tol).agrees


def discord_formula(a: Asym12, mode) -> float:
    """Closed-form discord of the same-party pair 13 (and 24)."""
    if as_mode(mode) is Mode.LOCAL:
        return a.pq**2 / (2.0 * (1.0 - a.pq) ** 2)
    return a.pq**2 / (2.0 * (2.0 - 3.0 * a.pq) ** 2)


@dataclass(frozen=True)
class DiscordAudit:
    """Simulated and closed-form discord of the local pairs, plus zero checks.

    ``degenerate`` maps each extreme cloner (p = 0 and p = 1) to the
    discord of every output pair, and ``groups_hit`` records whether
    each nonlocal group then contains a zero-discord pair.
    """

    p: float
    mode: str
    d13: float
    d24: float
    formula: float
    degenerate: dict
    groups_hit: dict

    def matches(self, tol: float = 1e-10) -> bool:
        return abs(self.d13 - self.formula) <= tol and abs(self.d24 - self.formula) <= tol

    def implication_holds(self, tol: float = 1e-12) -> bool:
        """Zero local discord at p in {0, 1} comes with a zero in every group."""
        for p_end, d in self.degenerate.items():
            if d["13"] <= tol and not all(self.groups_hit[p_end].values()):
                return False
        return True


def _simulate(rho, a: Asym12, mode):
    if as_mode(mode) is Mode.LOCAL:
        return broadcast_1to2_local(rho, a)
    return broadcast_1to2_nonlocal(rho, a)


def discord_audit_1to2(a: Asym12, mode, sample: CanonicalTwoQubit, zero_tol: float = 1e-12) -> DiscordAudit:
    mode = as_mode(mode)
    rho = from_canonical(sample)
    ens = _simulate(rho, a, mode)
    d13 = geometric_discord(ens["13"]).d_g
    d24 = geometric_discord(ens["24"]).d_g
    degenerate, hits = {}, {}
    for p_end in (0.0, 1.0):
        e = _simulate(rho, Asym12(p_end), mode)
        d = {lab: geometric_discord(e[lab]).d_g for lab in e.labels()}
        degenerate[p_end] = d
        hits[p_end] = {
            g.value: any(d[lab] <= zero_tol for lab in GROUP_PAIRS[g]) for g in Group
        }
    return DiscordAudit(a.p, mode.value, d13, d24, discord_formula(a, mode), degenerate, hits)
