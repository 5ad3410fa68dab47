"""Brute-force broadcasting: apply cloner isometries and take partial traces.

These are the reference results; closed forms are checked against them.
Internally wires are 0-based, so wire label w sits at index w - 1.
"""

from __future__ import annotations

from qbroadcast.cloners import (
    Asym12,
    Asym13,
    SuccessiveParams,
    direct13_isometry,
    local_cloner_isometry,
    nonlocal_cloner_isometry,
)
from qbroadcast.families import nme
from qbroadcast.qcore import DensityOp, WireError, apply_isometry, partial_trace, permute_wires
from qbroadcast.pipelines.closed_forms import Mode, as_mode
from qbroadcast.pipelines.ensemble import (
    CROSS_1TO3,
    LOCAL_1TO3,
    NONLOCAL_1TO3,
    PAIRS_1TO2,
    OutputEnsemble,
    pair_wires,
)


def _pairs(state: DensityOp, labels) -> dict[str, DensityOp]:
    return {lab: partial_trace(state, [w - 1 for w in pair_wires(lab)]) for lab in labels}


def _check_two_wire(rho: DensityOp):
    if rho.wire_count != 2:
        raise WireError(f"broadcasting needs a two-qubit input, got {rho.wire_count} wires")


def _local_step(state: DensityOp, a: Asym12, wires) -> DensityOp:
    """Clone each listed wire; clone 1 stays in place, clone 2 is appended."""
    v = local_cloner_isometry(a)
    for w in wires:
        state = apply_isometry(state, v, [w], discard=[2])
    return state


def _nonlocal_step(state: DensityOp, a: Asym12, wires) -> DensityOp:
    v = nonlocal_cloner_isometry(a)
    return apply_isometry(state, v, list(wires), discard=[4, 5])


def broadcast_1to2_full(rho12: DensityOp, a: Asym12, mode) -> DensityOp:
    """Four-wire output state in label order (machines traced out)."""
    _check_two_wire(rho12)
    if as_mode(mode) is Mode.LOCAL:
        return _local_step(rho12, a, [0, 1])
    return _nonlocal_step(rho12, a, [0, 1])


def broadcast_1to2_local(rho12: DensityOp, a: Asym12) -> OutputEnsemble:
    state = broadcast_1to2_full(rho12, a, Mode.LOCAL)
    return OutputEnsemble(_pairs(state, PAIRS_1TO2), {"strategy": "1to2-local", "p": a.p})


def broadcast_1to2_nonlocal(rho12: DensityOp, a: Asym12) -> OutputEnsemble:
    state = broadcast_1to2_full(rho12, a, Mode.NONLOCAL)
    return OutputEnsemble(_pairs(state, PAIRS_1TO2), {"strategy": "1to2-nonlocal", "p": a.p})


# cross pairs are cheap here and let verdicts test every A/B matching
SIX_WIRE_LABELS = NONLOCAL_1TO3 + LOCAL_1TO3 + CROSS_1TO3


def successive_state(
    rho12: DensityOp, sp: SuccessiveParams, mode, mirrored: bool = False
) -> DensityOp:
    """Six-wire state after two cloning steps.

    Step 2 acts on the step-1 clone 2 (wires 3, 4) in local mode and on
    clone 1 (wires 1, 2) in nonlocal mode; ``mirrored`` swaps that choice.
    Its clone 2 lands on wires 5, 6.
    """
    _check_two_wire(rho12)
    mode = as_mode(mode)
    on_second = (mode is Mode.LOCAL) != mirrored
    targets = [2, 3] if on_second else [0, 1]
    if mode is Mode.LOCAL:
        state = _local_step(rho12, sp.step(1), [0, 1])
        return _local_step(state, sp.step(2), targets)
    state = _nonlocal_step(rho12, sp.step(1), [0, 1])
    return _nonlocal_step(state, sp.step(2), targets)


def successive_broadcast(
    k: float | DensityOp, sp: SuccessiveParams, mode, mirrored: bool = False
) -> OutputEnsemble:
    """Successive 1->3 broadcast of nme(k) (or of a given two-qubit state)."""
    rho = k if isinstance(k, DensityOp) else nme(k)
    mode = as_mode(mode)
    state = successive_state(rho, sp, mode, mirrored)
    prov = {
        "strategy": f"successive-{mode.value}",
        "p1": sp.p1,
        "p2": sp.p2,
        "mirrored": mirrored,
    }
    if not isinstance(k, DensityOp):
        prov["k"] = float(k)
    return OutputEnsemble(_pairs(state, SIX_WIRE_LABELS), prov)


def direct13_state(rho12: DensityOp, a: Asym13, mode) -> DensityOp:
    """Six-wire state after direct 1->3 cloning, ancillas traced out."""
    _check_two_wire(rho12)
    mode = as_mode(mode)
    expected_d = 2 if mode is Mode.LOCAL else 4
    if a.d != expected_d:
        raise ValueError(f"{mode.value} direct cloning needs d={expected_d}, got d={a.d}")
    v = direct13_isometry(a)
    if mode is Mode.LOCAL:
        # outputs (A, B, C, E, F) per side; E, F dropped
        state = apply_isometry(rho12, v, [0], discard=[3, 4])
        state = apply_isometry(state, v, [1], discard=[3, 4])
        # now A_a, A_b, B_a, C_a, B_b, C_b
        return permute_wires(state, [0, 1, 2, 4, 3, 5])
    return apply_isometry(rho12, v, [0, 1], discard=[6, 7, 8, 9])


def direct13_broadcast(k: float | DensityOp, a: Asym13, mode) -> OutputEnsemble:
    rho = k if isinstance(k, DensityOp) else nme(k)
    mode = as_mode(mode)
    state = direct13_state(rho, a, mode)
    prov = {
        "strategy": f"direct13-{mode.value}",
        "alpha": a.alpha,
        "beta": a.beta,
        "gamma": a.gamma,
    }
    if not isinstance(k, DensityOp):
        prov["k"] = float(k)
    return OutputEnsemble(_pairs(state, SIX_WIRE_LABELS), prov)
