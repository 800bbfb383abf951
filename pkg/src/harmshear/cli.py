"""Command line entry point: ``harmshear run|list-scenarios|emit-boundary|sweep-eta``.

Exit codes: 0 when every verdict meets its expectation, 2 when any check
fails or stays inconclusive, 3 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .combine import CombinationSpec, Mode, combine
from .criteria import check_local_univalence
from .errors import HarmshearError, UsageError
from .geometry import boundary_polyline
from .report import Grid, Verdict, _jsonable
from .runner import Context, build_map, build_subjects, report_json, report_text, run_scenario
from .scenario import bundled_scenarios, load_scenario, parse_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="harmshear", description="Shear-construction scenario runner")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    run = sub.add_parser("run", help="run a scenario file or bundled scenario")
    run.add_argument("scenario")
    run.add_argument("--out", help="directory for <name>.json, <name>.txt and boundary CSVs")
    run.add_argument("--json", action="store_true", help="print the structured report instead of text")

    sub.add_parser("list-scenarios", help="list bundled scenarios")

    eb = sub.add_parser("emit-boundary", help="write the image of |z| = r as CSV")
    eb.add_argument("scenario")
    eb.add_argument("map_id", help="a map name, or a combination label such as eta=0.5")
    eb.add_argument("--r", type=float, default=0.99)
    eb.add_argument("--samples", type=int, default=2048)
    eb.add_argument("--out", required=True)

    sw = sub.add_parser("sweep-eta", help="local univalence over a polar grid of eta")
    sw.add_argument("scenario")
    sw.add_argument("--radius", type=float, default=1.0)
    sw.add_argument("--steps", type=int, default=8)
    sw.add_argument("--out", help="write the sweep as JSON")
    return ap


def _context(sc):
    grid = Grid.standard(*sc.grid)
    maps, blends = {}, {}
    for name, decl in sc.maps.items():
        maps[name], blends[name], _ = build_map(decl, sc.order)
    return Context(sc, grid, maps, blends, None)


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    report = run_scenario(sc, out)
    text, js = report_text(report), report_json(report)
    if out is not None:
        (out / f"{sc.name}.json").write_text(js)
        (out / f"{sc.name}.txt").write_text(text)
    sys.stdout.write(js if args.json else text)
    return EXIT_OK if report["overall"] == Verdict.PASS.value else EXIT_FAIL


def cmd_list(args) -> int:
    for path in bundled_scenarios():
        sc = parse_scenario(path.read_text(), path.name)
        print(f"{sc.name:<28} {sc.exercises}")
    return EXIT_OK


def cmd_emit_boundary(args) -> int:
    sc = load_scenario(args.scenario)
    if args.samples < 16:
        raise UsageError("--samples must be at least 16")
    if not 0 < args.r < 1:
        raise UsageError("--r must lie in (0, 1)")
    ctx = _context(sc)
    if args.map_id in ctx.maps:
        f = ctx.maps[args.map_id]
    else:
        subjects = {s.label: s for s in build_subjects(ctx)} if sc.combination else {}
        if args.map_id not in subjects:
            known = sorted(ctx.maps) + sorted(subjects)
            raise UsageError(f"unknown map id {args.map_id!r}; known: {', '.join(known)}")
        s = subjects[args.map_id]
        f = s.post if s.post is not None else s.pre
    boundary_polyline(f, args.r, args.samples).write_csv(args.out)
    print(f"wrote {args.samples} vertices to {args.out}")
    return EXIT_OK


def cmd_sweep_eta(args) -> int:
    sc = load_scenario(args.scenario)
    comb = sc.combination
    if comb is None or comb.mode == "multi":
        raise UsageError("sweep-eta needs a scenario with a two-map combination")
    if args.steps < 1 or args.radius <= 0:
        raise UsageError("--steps must be positive and --radius > 0")
    ctx = _context(sc)
    f1, f2 = ctx.maps[comb.maps[0]], ctx.maps[comb.maps[1]]
    mode = Mode.SAME if comb.mode == "same" else Mode.CONJUGATE
    n_ang = 4 * args.steps
    etas = [0j] + [
        args.radius * i / args.steps * complex(math.cos(2 * math.pi * k / n_ang), math.sin(2 * math.pi * k / n_ang))
        for i in range(1, args.steps + 1)
        for k in range(n_ang)
    ]
    rows, all_pass = [], True
    for eta in etas:
        rep = check_local_univalence(combine(CombinationSpec(f1, f2, eta, mode)), ctx.grid)
        all_pass &= rep.passed
        rows.append({"eta": eta, "max_abs_dilatation": rep.extremal_value, "verdict": rep.verdict.value})
        print(f"eta={eta.real:+.4f}{eta.imag:+.4f}j  max|omega|={rep.extremal_value:.6f}  {rep.verdict.value}")
    if args.out:
        Path(args.out).write_text(json.dumps(_jsonable({"scenario": sc.name, "sweep": rows}), indent=2) + "\n")
    return EXIT_OK if all_pass else EXIT_FAIL


COMMANDS = {
    "run": cmd_run,
    "list-scenarios": cmd_list,
    "emit-boundary": cmd_emit_boundary,
    "sweep-eta": cmd_sweep_eta,
}


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"harmshear: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HarmshearError as exc:
        print(f"harmshear: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
