"""Command-line entry point: verify, scan, search, state and broadcast."""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from qbroadcast import __version__
from qbroadcast.checks import closed_form_checks, discord_checks, theorem_checks
from qbroadcast.cloners import Asym12, Asym13, SuccessiveParams, solve_gamma
from qbroadcast.families import bell_diagonal, mems, nme, werner_like
from qbroadcast.measures import ENTANGLEMENT_TOL, concurrence, geometric_discord, linear_entropy, ph_report
from qbroadcast.qcore import QBroadcastError, to_canonical
from qbroadcast.pipelines.closed_forms import (
    Mode,
    closed_form_1to2,
    closed_form_direct13,
    closed_form_successive,
)
from qbroadcast.pipelines.ensemble import Group, verdict, verdict_1to3
from qbroadcast.pipelines.scans import ScanTable, fig2_table, fig4_table, fig6_table
from qbroadcast.pipelines.simulate import (
    broadcast_1to2_local,
    broadcast_1to2_nonlocal,
    direct13_broadcast,
    successive_broadcast,
)
from qbroadcast.unisearch import (
    SearchConfig,
    family_grid,
    random_search,
    range_fraction,
    reference_unitaries,
    unitary_table,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

SCAN_FIGURES = ("fig2", "fig4", "fig6", "bds-cones", "werner-unitary")
SEARCH_GRID = {"werner": 21, "bds": 11}
SCAN_GRID = {"fig2": 201, "fig4": 201, "fig6": 201, "bds-cones": 41, "werner-unitary": 101}
FLOOR_RATIO = 0.95


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def _plain(v):
    """JSON-safe value: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    return v


def dumps_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_type(a: np.ndarray) -> str:
    if a.dtype == bool:
        return "bool"
    if np.issubdtype(a.dtype, np.integer):
        return "int"
    return "float"


def _csv_cell(v, kind: str) -> str:
    if kind == "bool":
        return "1" if v else "0"
    if kind == "int":
        return str(int(v))
    return format(float(v), ".17g")


def table_csv(table: ScanTable) -> str:
    """'#schema:' line, header line, then one row per grid point."""
    cols = [np.asarray(table[c]) for c in table.columns]
    kinds = [_csv_type(a) for a in cols]
    lines = [
        "#schema: " + ",".join(f"{c}:{k}" for c, k in zip(table.columns, kinds)),
        ",".join(table.columns),
    ]
    for i in range(len(table)):
        lines.append(",".join(_csv_cell(a[i], k) for a, k in zip(cols, kinds)))
    return "\n".join(lines) + "\n"


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


def write_outputs(args, files: dict[Path, str], started: str) -> Path:
    """Write each file, then one manifest naming all of them with digests."""
    outputs = []
    for path, text in files.items():
        data = text.encode()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        outputs.append({"path": path.name, "sha256": hashlib.sha256(data).hexdigest()})
    first = next(iter(files))
    manifest = first.with_name(first.name + ".manifest.json")
    body = {
        "command": args.command,
        "params": _echo(args),
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "started": started,
        "finished": _now(),
        "outputs": outputs,
    }
    manifest.write_text(dumps_json(body))
    return manifest


def _echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("handler", "command") and not k.startswith("_")}


# ---------------------------------------------------------------- commands


def cmd_verify(args) -> int:
    suites = {
        "closed-forms": lambda: closed_form_checks(seed=args.seed, tol=args.oracle_tol),
        "theorems": lambda: theorem_checks(args.grid_n or 201, args.tol, args.seed),
        "discord": lambda: discord_checks(seed=args.seed),
    }
    scopes = list(suites) if args.scope == "all" else [args.scope]
    results = [r for s in scopes for r in suites[s]()]
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if args.out:
        report = {"scope": args.scope, "passed": not failed, "checks": [r.as_dict() for r in results]}
        write_outputs(args, {Path(args.out): dumps_json(report)}, args._started)
    if failed:
        print(f"first failing check: {failed[0].name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _scan_table(args) -> ScanTable:
    n = args.grid_n or SCAN_GRID[args.figure]
    bf = args.force_brute_force
    if args.figure == "fig2":
        return fig2_table(n, args.tol, bf)
    if args.figure == "fig4":
        return fig4_table(n, args.nk or n, args.tol, args.mirrored, bf)
    if args.figure == "fig6":
        return fig6_table(n, args.nk or n, args.tol, bf)
    family = "bds" if args.figure == "bds-cones" else "werner"
    u = reference_unitaries()[family]
    return unitary_table(u, family_grid(family, n), args.tol, {"figure": args.figure, "grid_n": n})


def cmd_scan(args) -> int:
    table = _scan_table(args)
    out = Path(args.out or f"{args.figure}.csv")
    manifest = write_outputs(args, {out: table_csv(table)}, args._started)
    print(f"wrote {len(table)} rows to {out} (manifest {manifest.name})")
    return EXIT_OK


def cmd_search(args) -> int:
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    n = args.grid_n or SEARCH_GRID[args.family]
    grid = family_grid(args.family, n)
    cfg = SearchConfig(args.family, grid, args.seed, args.restarts, args.refine_steps, args.tol)
    res = random_search(cfg)
    body = res.as_dict()
    body.update({"family": args.family, "grid_n": n, "grid_points": len(grid)})
    status = EXIT_OK
    if args.check_floor:
        ref = range_fraction(reference_unitaries()[args.family], grid, args.tol)
        ok = res.best_fraction >= FLOOR_RATIO * ref
        body["reference_fraction"] = ref
        body["floor_check_passed"] = ok
        print(f"{'PASS' if ok else 'FAIL'} floor best={res.best_fraction:.6g} reference={ref:.6g}")
        status = EXIT_OK if ok else EXIT_FAIL
    text = dumps_json(body)
    if args.out:
        write_outputs(args, {Path(args.out): text}, args._started)
    else:
        sys.stdout.write(text)
    return status


def _state(args):
    fam = args.family
    need = {"mems": ("r",), "nme": ("k",), "werner": ("mix", "k"), "bds": ("c1", "c2", "c3")}[fam]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {fam} needs {' '.join(missing)}")
    vals = [getattr(args, n) for n in need]
    build = {"mems": mems, "nme": nme, "werner": werner_like, "bds": bell_diagonal}[fam]
    try:
        return build(*vals), dict(zip(need, vals))
    except (QBroadcastError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_state(args) -> int:
    rho, params = _state(args)
    c = to_canonical(rho)
    body = {
        "family": args.family,
        "params": params,
        "matrix_real": rho.matrix.real,
        "matrix_imag": rho.matrix.imag,
        "canonical": c.as_dict(),
        "concurrence": concurrence(rho),
        "geometric_discord": geometric_discord(rho).d_g,
        "linear_entropy": linear_entropy(rho),
        "ph_report": ph_report(rho, args.tol).as_dict(),
    }
    return _emit(args, body)


def _emit(args, body) -> int:
    text = dumps_json(body)
    if args.out:
        write_outputs(args, {Path(args.out): text}, args._started)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"protocol {args.protocol} needs {' '.join(missing)}")


def cmd_broadcast(args) -> int:
    rho, params = _state(args)
    mode = Mode(args.mode)
    c = to_canonical(rho)
    bf = args.force_brute_force
    try:
        if args.protocol == "1to2":
            _require(args, "p")
            a = Asym12(args.p)
            if bf:
                ens = broadcast_1to2_local(rho, a) if mode is Mode.LOCAL else broadcast_1to2_nonlocal(rho, a)
            else:
                ens = closed_form_1to2(c, a, mode)
            verdicts = {g.value: _verdict12(verdict(ens, g, args.tol)) for g in Group}
        else:
            if args.protocol == "successive":
                _require(args, "p1", "p2")
                sp = SuccessiveParams(args.p1, args.p2)
                ens = (successive_broadcast(rho, sp, mode, args.mirrored) if bf
                       else closed_form_successive(c, sp, mode, args.mirrored))
            else:
                _require(args, "alpha", "beta")
                d = 2 if mode is Mode.LOCAL else 4
                gamma = args.gamma if args.gamma is not None else max(solve_gamma(args.alpha, args.beta, d))
                w = Asym13(args.alpha, args.beta, gamma, d)
                ens = direct13_broadcast(rho, w, mode) if bf else closed_form_direct13(c, w, mode)
            v = verdict_1to3(ens, args.tol)
            verdicts = {
                "nonlocal_entangled": v.nonlocal_entangled,
                "locals_separable": v.locals_separable,
                "optimal": v.optimal,
                "any_matching_entangled": v.any_matching_entangled,
                "any_matching_optimal": v.any_matching_optimal,
            }
    except (QBroadcastError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    body = {
        "family": args.family,
        "params": params,
        "protocol": args.protocol,
        "mode": mode.value,
        "brute_force": bf,
        "pairs": {lab: ph_report(ens[lab], args.tol).as_dict() for lab in ens.labels()},
        "verdict": verdicts,
    }
    return _emit(args, body)


def _verdict12(v) -> dict:
    return {"nonlocal_entangled": v.nonlocal_entangled, "locals_separable": v.locals_separable, "optimal": v.optimal}


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=ENTANGLEMENT_TOL, help="entanglement tolerance")
    p.add_argument("--out", help="output path; a manifest is written next to it")


def _add_state_flags(p: argparse.ArgumentParser):
    p.add_argument("--family", required=True, choices=("mems", "nme", "werner", "bds"))
    p.add_argument("--r", type=float, help="MEMS concurrence")
    p.add_argument("--k", type=float, help="NME or Werner-like weight")
    p.add_argument("--mix", type=float, help="Werner-like mixing weight")
    for name in ("c1", "c2", "c3"):
        p.add_argument(f"--{name}", type=float, help="Bell-diagonal correlation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbroadcast", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--scope", choices=("all", "closed-forms", "theorems", "discord"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-n", type=int, help="MEMS grid size for the theorem suite")
    p.add_argument("--oracle-tol", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("scan", help="write a figure grid as CSV")
    p.add_argument("--figure", required=True, choices=SCAN_FIGURES)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--nk", type=int, help="k grid size for fig4 and fig6")
    p.add_argument("--mirrored", action="store_true", help="fig4: re-clone the first pair")
    p.add_argument("--force-brute-force", action="store_true")
    _add_common(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("search", help="seeded search over real 4x4 unitaries")
    p.add_argument("--family", required=True, choices=("werner", "bds"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--refine-steps", type=int, default=1)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--check-floor", action="store_true",
                   help=f"fail unless the result reaches {FLOOR_RATIO} of the reference unitary")
    _add_common(p)
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("state", help="dump a family state with its measures")
    _add_state_flags(p)
    _add_common(p)
    p.set_defaults(handler=cmd_state)

    p = sub.add_parser("broadcast", help="broadcast one family state with one cloner setting")
    _add_state_flags(p)
    p.add_argument("--protocol", choices=("1to2", "successive", "direct13"), default="1to2")
    p.add_argument("--mode", choices=("local", "nonlocal"), default="local")
    p.add_argument("--p", type=float, help="1->2 cloner asymmetry")
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float, help="defaults to the largest admissible root")
    p.add_argument("--mirrored", action="store_true")
    p.add_argument("--force-brute-force", action="store_true")
    _add_common(p)
    p.set_defaults(handler=cmd_broadcast)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._started = _now()
    try:
        return args.handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qbroadcast: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qbroadcast: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
