"""Closed-form output states of the broadcasting protocols.

Every output pair has the shape {a * u, b * v, t * M}: its Bloch vectors
are rescaled input Bloch vectors (u, v each the first- or second-wire
vector of the input) and its correlation matrix is a multiple of either
the input T or the identity. A table of PairForm records therefore
describes a whole protocol, and the same table evaluates one state or a
batch of grid points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from qbroadcast.cloners import Asym12, Asym13, SuccessiveParams
from qbroadcast.measures import min_pt_eigenvalue
from qbroadcast.qcore import CanonicalTwoQubit, canonical_matrix, from_canonical
from qbroadcast.pipelines.ensemble import OutputEnsemble


class Mode(enum.Enum):
    LOCAL = "local"
    NONLOCAL = "nonlocal"


def as_mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(str(mode))


@dataclass(frozen=True)
class PairForm:
    a: Any
    a_src: str
    b: Any
    b_src: str
    t: Any
    t_kind: str

    def evaluate(self, x, y, T):
        """Output (x, y, T) arrays; coefficients broadcast against the inputs."""
        src = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float)}
        a = np.asarray(self.a, dtype=float)[..., None]
        b = np.asarray(self.b, dtype=float)[..., None]
        t = np.asarray(self.t, dtype=float)[..., None, None]
        corr = np.asarray(T, dtype=float) if self.t_kind == "T" else np.eye(3)
        return a * src[self.a_src], b * src[self.b_src], t * corr


def _nonlocal_pair(sa, sb, t):
    return PairForm(sa, "x", sb, "y", t, "T")


def _local_pair(sa, sb, t, side):
    return PairForm(sa, side, sb, side, t, "I")


def forms_1to2(p, mode) -> dict[str, PairForm]:
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    if as_mode(mode) is Mode.LOCAL:
        mu = 1.0 / (1.0 - p * q)
        s1, s2, c = p * mu, q * mu, p * q * mu
        return {
            "13": _local_pair(s1, s2, c, "x"),
            "24": _local_pair(s1, s2, c, "y"),
            "14": _nonlocal_pair(s1, s2, s1 * s2),
            "23": _nonlocal_pair(s2, s1, s1 * s2),
            "12": _nonlocal_pair(s1, s1, s1 * s1),
            "34": _nonlocal_pair(s2, s2, s2 * s2),
        }
    eta = 2.0 - 3.0 * p * q
    k1, k2, c = p * (1.0 + p) / eta, q * (2.0 - p) / eta, p * q / eta
    return {
        "13": _local_pair(k1, k2, c, "x"),
        "24": _local_pair(k1, k2, c, "y"),
        "14": _nonlocal_pair(k1, k2, c),
        "23": _nonlocal_pair(k2, k1, c),
        "12": _nonlocal_pair(k1, k1, k1),
        "34": _nonlocal_pair(k2, k2, k2),
    }


def _six_wire_forms(shrink, local_corr, mode: Mode) -> dict[str, PairForm]:
    """Assemble the 1->3 table from per-clone shrinks and local-pair weights.

    ``shrink`` maps clone index 1..3 to its Bloch scale. ``local_corr``
    maps (clone i, clone j) to the identity weight of same-party pairs.
    Local protocols also get cross pairs, which are products of the two
    single-side channels; nonlocal ones have no closed form for those.
    """
    s = shrink
    out = {}
    for i, lab in enumerate(("12", "34", "56"), start=1):
        t = s[i] * s[i] if mode is Mode.LOCAL else s[i]
        out[lab] = _nonlocal_pair(s[i], s[i], t)
    for (i, j), c in local_corr.items():
        out[f"{2 * i - 1}{2 * j - 1}"] = _local_pair(s[i], s[j], c, "x")
        out[f"{2 * i}{2 * j}"] = _local_pair(s[i], s[j], c, "y")
    if mode is Mode.LOCAL:
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if i != j:
                    out[f"{2 * i - 1}{2 * j}"] = _nonlocal_pair(s[i], s[j], s[i] * s[j])
    return out


def forms_successive(p1, p2, mode, mirrored: bool = False) -> dict[str, PairForm]:
    """Two-step 1->3 broadcast.

    Default step 2 re-clones clone 2 of step 1 (wires 3, 4) in local mode
    and clone 1 (wires 1, 2) in nonlocal mode. ``mirrored`` re-clones the
    other step-1 clone instead. Step 2 always writes clone 1 back in place
    and clone 2 to wires 5, 6.
    """
    mode = as_mode(mode)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    q1, q2 = 1.0 - p1, 1.0 - p2
    if mode is Mode.LOCAL:
        mu1, mu2 = 1.0 / (1.0 - p1 * q1), 1.0 / (1.0 - p2 * q2)
        f1, g1, c1 = p1 * mu1, q1 * mu1, p1 * q1 * mu1
        f2, g2, c2 = p2 * mu2, q2 * mu2, p2 * q2 * mu2
    else:
        e1, e2 = 2.0 - 3.0 * p1 * q1, 2.0 - 3.0 * p2 * q2
        f1, g1, c1 = p1 * (1.0 + p1) / e1, q1 * (2.0 - p1) / e1, p1 * q1 / e1
        f2, g2, c2 = p2 * (1.0 + p2) / e2, q2 * (2.0 - p2) / e2, p2 * q2 / e2
    # which step-1 clone step 2 acts on
    second = (mode is Mode.LOCAL) != mirrored
    if second:
        shrink = {1: f1, 2: g1 * f2, 3: g1 * g2}
        corr = {(1, 2): c1 * f2, (1, 3): c1 * g2, (2, 3): c2}
    else:
        shrink = {1: f1 * f2, 2: g1, 3: f1 * g2}
        corr = {(1, 2): c1 * f2, (2, 3): c1 * g2, (1, 3): c2}
    return _six_wire_forms(shrink, corr, mode)


@dataclass(frozen=True)
class ClosedForm13Coeffs:
    """Scale factors of the direct 1->3 outputs.

    Local (d=2): clone shrinks A1..A3, ``B_over_K`` (B = B_over_K * K,
    which the constraint makes 1) and the same-party identity weights
    ``pair_ab``, ``pair_bc``, ``pair_ac``. Nonlocal (d=4): clone shrinks
    b1..b3 (B_i = b_i * K) and identity weights C1..C3, where C3 belongs to
    clones (A, B), C1 to (B, C) and C2 to (A, C).
    """

    A1: Any = None
    A2: Any = None
    A3: Any = None
    B_over_K: Any = None
    pair_ab: Any = None
    pair_bc: Any = None
    pair_ac: Any = None
    b1: Any = None
    b2: Any = None
    b3: Any = None
    C1: Any = None
    C2: Any = None
    C3: Any = None

    def B(self, k):
        return self.B_over_K * (2.0 * np.asarray(k) - 1.0)

    def B_i(self, i: int, k):
        return (self.b1, self.b2, self.b3)[i - 1] * (2.0 * np.asarray(k) - 1.0)


def coeffs_13(alpha, beta, gamma, d: int) -> ClosedForm13Coeffs:
    a, b, g = (np.asarray(v, dtype=float) for v in (alpha, beta, gamma))
    if d == 2:
        return ClosedForm13Coeffs(
            A1=(3 * a * a + 3 * a * b + 3 * a * g + b * g) / 3,
            A2=(3 * b * b + 3 * a * b + 3 * b * g + a * g) / 3,
            A3=(3 * g * g + 3 * a * g + 3 * b * g + a * b) / 3,
            B_over_K=a * a + a * b + a * g + b * b + b * g + g * g,
            pair_ab=(3 * a * b + a * g + b * g + g * g) / 3,
            pair_bc=(3 * b * g + a * b + a * g + a * a) / 3,
            pair_ac=(3 * a * g + a * b + b * g + b * b) / 3,
        )
    return ClosedForm13Coeffs(
        b1=(10 * a * a + 5 * a * b + 5 * a * g + b * g) / 10,
        b2=(5 * a * b + a * g + 10 * b * b + 5 * b * g) / 10,
        b3=(a * b + 5 * a * g + 5 * b * g + 10 * g * g) / 10,
        C1=(2 * a * a + a * b + a * g + 5 * b * g) / 10,
        C2=(a * b + 5 * a * g + 2 * b * b + b * g) / 10,
        C3=(5 * a * b + a * g + b * g + 2 * g * g) / 10,
    )


def forms_direct13(alpha, beta, gamma, mode) -> dict[str, PairForm]:
    mode = as_mode(mode)
    if mode is Mode.LOCAL:
        c = coeffs_13(alpha, beta, gamma, 2)
        shrink = {1: c.A1, 2: c.A2, 3: c.A3}
        corr = {(1, 2): c.pair_ab, (2, 3): c.pair_bc, (1, 3): c.pair_ac}
    else:
        c = coeffs_13(alpha, beta, gamma, 4)
        shrink = {1: c.b1, 2: c.b2, 3: c.b3}
        corr = {(1, 2): c.C3, (2, 3): c.C1, (1, 3): c.C2}
    return _six_wire_forms(shrink, corr, mode)


def evaluate_forms(forms: dict[str, PairForm], x, y, T) -> dict[str, tuple]:
    return {lab: f.evaluate(x, y, T) for lab, f in forms.items()}


def forms_min_pt(forms: dict[str, PairForm], x, y, T, labels=None) -> dict[str, np.ndarray]:
    """Minimum partial-transpose eigenvalue of each pair, batched."""
    labels = labels or tuple(forms)
    out = {}
    for lab in labels:
        xo, yo, to = forms[lab].evaluate(x, y, T)
        out[lab] = min_pt_eigenvalue(canonical_matrix(xo, yo, to))
    return out


def _ensemble(forms, c: CanonicalTwoQubit, provenance: dict) -> OutputEnsemble:
    pairs = {}
    for lab, f in forms.items():
        xo, yo, to = f.evaluate(c.x, c.y, c.T)
        pairs[lab] = from_canonical(CanonicalTwoQubit(xo, yo, to))
    return OutputEnsemble(pairs, provenance)


def closed_form_1to2(c: CanonicalTwoQubit, a: Asym12, mode) -> OutputEnsemble:
    mode = as_mode(mode)
    prov = {"strategy": f"closed-form-1to2-{mode.value}", "p": a.p}
    return _ensemble(forms_1to2(a.p, mode), c, prov)


def closed_form_successive(
    c: CanonicalTwoQubit, sp: SuccessiveParams, mode, mirrored: bool = False
) -> OutputEnsemble:
    mode = as_mode(mode)
    prov = {
        "strategy": f"closed-form-successive-{mode.value}",
        "p1": sp.p1,
        "p2": sp.p2,
        "mirrored": mirrored,
    }
    return _ensemble(forms_successive(sp.p1, sp.p2, mode, mirrored), c, prov)


def closed_form_direct13(c: CanonicalTwoQubit, a: Asym13, mode) -> OutputEnsemble:
    mode = as_mode(mode)
    expected_d = 2 if mode is Mode.LOCAL else 4
    if a.d != expected_d:
        raise ValueError(f"{mode.value} direct cloning needs d={expected_d}, got d={a.d}")
    prov = {
        "strategy": f"closed-form-direct13-{mode.value}",
        "alpha": a.alpha,
        "beta": a.beta,
        "gamma": a.gamma,
    }
    return _ensemble(forms_direct13(a.alpha, a.beta, a.gamma, mode), c, prov)
