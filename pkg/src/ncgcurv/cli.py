"""Command-line front end.

    ncgcurv <command> [--geometry NAME|PATH] [--symbolic | --theta p/q]
                      [--json PATH] [--seed N] [--samples N] [--pi-component PATH]

Exit status: 0 when every requested check passes, 1 when a check fails
(the report is still written), 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .algebra import Mode
from .checks import ThetaContext
from .geometries import BUILTINS, SABOTAGE, GeometryError, GeometrySpec, resolve_geometry, tensor_from_json
from .suite import Section, SuiteConfig, run_suite

SCHEMA = "ncgcurv-report/1"

COMMANDS: Dict[str, Sequence[str]] = {
    "validate": ("validate",),
    "connection": ("validate", "connection"),
    "curvature": ("validate", "connection", "curvature"),
    "ricci": ("validate", "connection", "curvature"),
    "scalar": ("validate", "connection", "curvature"),
    "weitzenbock": ("validate", "dirac"),
    "deform-verify": ("validate", "deformation"),
    "check-all": ("validate", "connection", "curvature", "dirac", "deformation"),
}


class InputError(Exception):
    pass


def parse_theta(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--theta expects a rational p/q, got {text!r}") from None
    return q


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncgcurv", description="Levi-Civita connections, curvature and Dirac operators on frame geometries.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list built-in geometries and sabotage fixtures")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--geometry", "-g", default="torus", help="builtin or fixture name, or a geometry file")
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--symbolic", action="store_true", help="formal lam, structural zero tests (default)")
        mode.add_argument("--theta", metavar="p/q", help="evaluate residuals at lam = exp(2 pi i p/q)")
        sp.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance (with --theta)")
        sp.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=6)
        sp.add_argument("--pi-component", metavar="PATH", help="JSON rank-3 tensor added to A through Pi")
        sp.add_argument("--workers", type=int, default=4)
        sp.add_argument("--quiet", "-q", action="store_true", help="only print failures and the summary")
    return p


def _check_rows(sections: List[Section]) -> List[Dict[str, Any]]:
    rows = []
    for s in sections:
        for c in s.checks:
            row = {"section": s.name}
            row.update(c.as_dict())
            rows.append(row)
    return rows


def _summary(command: str, sections: List[Section]) -> Dict[str, Any]:
    data = {s.name: s.data for s in sections}
    out: Dict[str, Any] = {}
    curv = data.get("curvature", {})
    if curv:
        out["r"] = {m: {ch: e["scalar_curvature"] for ch, e in v.items()} for m, v in curv.items()}
    conn = data.get("connection", {})
    if conn:
        out["A_is_zero"] = {m: v["A_is_zero"] for m, v in conn.items()}
    dirac = data.get("dirac", {})
    if dirac:
        out["weitzenbock_factor"] = {m: v.get("weitzenbock_factor") for m, v in dirac.items()}
    return out


def _results(command: str, sections: List[Section]) -> Dict[str, Any]:
    data = {s.name: s.data for s in sections if s.data}
    curv = data.get("curvature")
    if curv and command in ("ricci", "scalar"):
        keep = ("scalar_curvature",) if command == "scalar" else ("ricci", "scalar_curvature")
        data["curvature"] = {m: {ch: {k: e[k] for k in keep} for ch, e in v.items()} for m, v in curv.items()}
        data.pop("connection", None)
    return data


def make_report(command: str, spec: GeometrySpec, ctx: ThetaContext, seed: int, sections: List[Section]) -> Dict[str, Any]:
    passed = all(s.passed for s in sections)
    return {
        "schema": SCHEMA,
        "command": command,
        "geometry": spec.name,
        "theta": "symbolic" if ctx.is_symbolic else str(ctx.q),
        "seed": seed,
        "passed": passed,
        "summary": _summary(command, sections),
        "checks": _check_rows(sections),
        "results": _results(command, sections),
    }


def dump_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _print_human(report: Dict[str, Any], elapsed: float, quiet: bool, out) -> None:
    print(f"geometry {report['geometry']}  theta {report['theta']}  seed {report['seed']}", file=out)
    for row in report["checks"]:
        if quiet and row["passed"]:
            continue
        status = "PASS" if row["passed"] else "FAIL"
        extra = f"  witness: {row['witness']}" if "witness" in row else ""
        print(f"  {status}  {row['section']}/{row['name']}{extra}", file=out)
    for key, val in report["summary"].items():
        print(f"  {key}: {json.dumps(val, sort_keys=True)}", file=out)
    n = len(report["checks"])
    bad = sum(1 for r in report["checks"] if not r["passed"])
    print(f"{n - bad}/{n} checks passed in {elapsed:.2f}s", file=out)


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "list":
        for name, f in BUILTINS.items():
            g = f()
            print(f"{name}\tbuiltin\tdim {g.dimension}\tframe {g.frame.n}\tspinors {g.dirac.rank}", file=out)
        for name in SABOTAGE:
            print(f"{name}\tsabotage fixture", file=out)
        return 0
    try:
        ctx = ThetaContext.symbolic() if args.theta is None else ThetaContext.numeric(parse_theta(args.theta), args.tol)
        spec = resolve_geometry(args.geometry, validate=False)
        pi = None
        if args.pi_component:
            try:
                pi = tensor_from_json(spec.algebra, json.loads(Path(args.pi_component).read_text()), "FFF")
            except (OSError, json.JSONDecodeError) as e:
                raise InputError(f"--pi-component: {e}") from None
    except (InputError, GeometryError) as e:
        print(f"ncgcurv: error: {e}", file=sys.stderr)
        return 2
    cfg = SuiteConfig(ctx=ctx, seed=args.seed, samples=args.samples, pi_component=pi, workers=args.workers)
    t0 = time.perf_counter()
    sections = run_suite(spec, cfg, COMMANDS[args.command])
    elapsed = time.perf_counter() - t0
    report = make_report(args.command, spec, ctx, args.seed, sections)
    text = dump_report(report)
    if args.json == "-":
        out.write(text)
    else:
        if args.json:
            Path(args.json).write_text(text, encoding="utf-8")
        _print_human(report, elapsed, args.quiet, out)
    return 0 if report["passed"] else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
