"""Output ensembles of broadcasting protocols and their verdicts.

Output wires are numbered from 1 with party A on odd and party B on even
wires. A pair label such as "23" names the two-wire state with the A-side
wire first (wires 3 then 2); pairs within one party are ascending.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import permutations

from qbroadcast.measures import ENTANGLEMENT_TOL, PHReport, ph_report
from qbroadcast.qcore import CanonicalTwoQubit, DensityOp, to_canonical

PAIRS_1TO2 = ("13", "24", "14", "23", "12", "34")
NONLOCAL_1TO3 = ("12", "34", "56")
LOCAL_1TO3 = ("13", "35", "15", "24", "46", "26")
CROSS_1TO3 = ("14", "16", "32", "36", "52", "54")


class Group(enum.Enum):
    DIAGONAL = "diagonal"
    HORIZONTAL = "horizontal"


GROUP_PAIRS = {Group.DIAGONAL: ("14", "23"), Group.HORIZONTAL: ("12", "34")}
LOCAL_1TO2 = ("13", "24")


def pair_wires(label: str) -> tuple[int, int]:
    """1-based wires of a pair label, in the order the pair state uses."""
    a, b = int(label[0]), int(label[1])
    if a % 2 == b % 2:
        return (min(a, b), max(a, b))
    return (a, b) if a % 2 == 1 else (b, a)


def pair_label(a: int, b: int) -> str:
    i, j = pair_wires(f"{a}{b}")
    return f"{i}{j}"


def all_matchings() -> list[tuple[str, str, str]]:
    """Every way to pair A wires {1,3,5} with B wires {2,4,6}."""
    return [
        tuple(pair_label(a, b) for a, b in zip((1, 3, 5), perm))
        for perm in permutations((2, 4, 6))
    ]


class MissingPairError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class OutputEnsemble:
    """Two-wire output states keyed by pair label, plus how they were made."""

    pairs: dict[str, DensityOp]
    provenance: dict = field(default_factory=dict)

    def __getitem__(self, label: str) -> DensityOp:
        try:
            return self.pairs[label]
        except KeyError:
            raise MissingPairError(f"ensemble has no pair {label!r}") from None

    def canonical(self, label: str) -> CanonicalTwoQubit:
        return to_canonical(self[label])

    def labels(self) -> tuple[str, ...]:
        return tuple(self.pairs)


@dataclass(frozen=True)
class BroadcastVerdict:
    group: Group
    nonlocal_entangled: bool
    locals_separable: bool
    optimal: bool
    per_pair: dict[str, PHReport]


def verdict(ensemble: OutputEnsemble, group: Group, tol: float = ENTANGLEMENT_TOL) -> BroadcastVerdict:
    """Optimal 1->2 broadcast: both pairs of the group entangled, 13 and 24 separable."""
    reports = {lab: ph_report(ensemble[lab], tol) for lab in GROUP_PAIRS[group] + LOCAL_1TO2}
    ent = all(reports[lab].entangled for lab in GROUP_PAIRS[group])
    sep = not any(reports[lab].entangled for lab in LOCAL_1TO2)
    return BroadcastVerdict(group, ent, sep, ent and sep, reports)


@dataclass(frozen=True)
class Verdict1to3:
    """Verdict on a six-wire ensemble.

    ``optimal`` uses the nonlocal pairs 12, 34, 56. When cross pairs are
    present, ``any_matching_entangled`` and ``any_matching_optimal`` repeat
    the test over every pairing of A wires with B wires.
    """

    nonlocal_entangled: bool
    locals_separable: bool
    optimal: bool
    any_matching_entangled: bool | None
    any_matching_optimal: bool | None
    per_pair: dict[str, PHReport]


def verdict_1to3(ensemble: OutputEnsemble, tol: float = ENTANGLEMENT_TOL) -> Verdict1to3:
    labels = NONLOCAL_1TO3 + LOCAL_1TO3
    have_cross = all(lab in ensemble.pairs for lab in CROSS_1TO3)
    if have_cross:
        labels += CROSS_1TO3
    reports = {lab: ph_report(ensemble[lab], tol) for lab in labels}
    ent = all(reports[lab].entangled for lab in NONLOCAL_1TO3)
    sep = not any(reports[lab].entangled for lab in LOCAL_1TO3)
    any_ent = any_opt = None
    if have_cross:
        hits = [all(reports[lab].entangled for lab in m) for m in all_matchings()]
        any_ent = any(hits)
        any_opt = any_ent and sep
    return Verdict1to3(ent, sep, ent and sep, any_ent, any_opt, reports)
