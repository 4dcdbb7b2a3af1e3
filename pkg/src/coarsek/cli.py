"""Command-line entry point: run, snf, excision, simplex, sweep.

Builtin examples (rn:<n>, zinf:<m>, wedge:<k> or wedge:countable:<cap>)
embed the cover generators, so the headline computations run with no
input files.  Exit codes: 0 success, 1 input error, 2 the run computed
but left an ambiguous extension (pieces are still printed).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import jsonio
from .abelian import AbelianError, smith_normal_form
from .assembly import (
    AssemblyError,
    assemble_target,
    build_ideal_chain_e1,
    build_mv_e1,
    truncation_sweep,
)
from .coarse import (
    CoarseError,
    Metric,
    block_decomposition,
    check_cover_excision,
    disjoint_rays,
    rn_mv_input,
    wedge_mv_input,
    zinf_mv_input,
)
from .jsonio import SchemaError
from .pages import PageError, run_to_infinity
from .simplex import verify_geometry


class CliError(Exception):
    """Input-level failure; exits with code 1."""


def _parse_builtin(name: str, cap: int | None):
    parts = name.split(":")
    kind = parts[0]
    try:
        if kind == "rn" and len(parts) == 2:
            return rn_mv_input(int(parts[1]))
        if kind == "zinf" and len(parts) == 2:
            m = int(parts[1])
            return zinf_mv_input(m, m if cap is None else cap)
        if kind == "wedge" and len(parts) == 2 and parts[1] != "countable":
            return wedge_mv_input(int(parts[1]))
        if kind == "wedge" and len(parts) == 3 and parts[1] == "countable":
            return wedge_mv_input(int(parts[2]), truncated=True)
    except ValueError as exc:
        raise CliError(f"bad builtin parameter in {name!r}: {exc}") from exc
    raise CliError(
        f"unknown builtin {name!r}; expected rn:<n>, zinf:<m>, wedge:<k>, wedge:countable:<cap>"
    )


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        return json.loads(text), text
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _cmd_run(args) -> int:
    if args.builtin:
        if args.period != 2:
            raise CliError("builtin examples are complex-K lookups; they require --period 2")
        inp = _parse_builtin(args.builtin, args.cap)
        page = build_mv_e1(inp)
        raw = None
    elif args.input:
        obj, raw = _load_json(args.input)
        kind = obj.get("kind", "mv")
        if kind == "mv":
            page = build_mv_e1(jsonio.mv_from_json(obj, args.period))
        elif kind == "ideal_chain":
            page = build_ideal_chain_e1(jsonio.ideal_chain_from_json(obj, args.period))
        elif kind == "page":
            page = jsonio.page_from_json(obj, args.period)
        else:
            raise CliError(f"unknown input kind {kind!r}")
    else:
        raise CliError("run needs --builtin NAME or --input PATH")
    if args.verbose and raw is not None:
        print("input:")
        print(raw.rstrip("\n"))
    run = run_to_infinity(page)
    report = assemble_target(run)
    if args.format == "json":
        print(jsonio.dumps(jsonio.report_to_json(report)))
    else:
        print(jsonio.report_to_table(report, verbose=args.verbose))
    return 2 if report.any_ambiguous else 0


def _cmd_snf(args) -> int:
    try:
        obj = json.loads(args.matrix)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed matrix JSON at column {exc.colno}: {exc.msg}") from exc
    matrix = jsonio.matrix_from_json(obj)
    if args.verbose:
        print("input:")
        print(args.matrix)
    result = smith_normal_form(matrix)
    if args.format == "json":
        print(
            jsonio.dumps(
                {
                    "D": jsonio.matrix_to_json(result.D),
                    "U": jsonio.matrix_to_json(result.U),
                    "V": jsonio.matrix_to_json(result.V),
                    "certificate_ok": result.check(),
                }
            )
        )
    else:
        print(f"D = diag{result.diagonal}")
        print(f"U = {result.U.to_rows()}")
        print(f"V = {result.V.to_rows()}")
        print(f"certificate: U*A*V == D and |det U| == |det V| == 1: {result.check()}")
    return 0


def _pick_cover(args):
    if args.builtin:
        parts = args.builtin.split(":")
        if parts[0] == "rn" and len(parts) == 2:
            return block_decomposition(int(parts[1]))
        raise CliError(f"unknown excision builtin {args.builtin!r}; expected rn:<n>")
    if args.custom == "disjoint-rays":
        return disjoint_rays()
    if args.cover:
        obj, _ = _load_json(args.cover)
        return [jsonio.blocky_from_json(item) for item in obj]
    raise CliError("excision needs --builtin rn:<n>, --custom disjoint-rays, or --cover PATH")


def _cmd_excision(args) -> int:
    cover = _pick_cover(args)
    dim = cover[0].dim
    if args.metric == "weighted":
        if not args.weights:
            raise CliError("weighted metric needs --weights")
        metric = Metric.weighted([Fraction(w) for w in args.weights.split(",")])
    else:
        metric = Metric(args.metric)
    radius = Fraction(args.radius)
    if args.s is not None:
        s_radius = Fraction(args.s)
    elif args.metric == "d1":
        s_radius = radius * dim
    else:
        s_radius = radius
    box = args.box if args.box is not None else int(2 * (s_radius + radius))
    if args.verbose:
        echo = {
            "cover_size": len(cover),
            "dim": dim,
            "metric": args.metric,
            "radius": str(radius),
            "s": str(s_radius),
            "box": box,
        }
        print("input:")
        print(jsonio.dumps(echo))
    results = check_cover_excision(cover, radius, metric, box, s_radius=s_radius)
    all_ok = all(r.ok for r in results.values())
    if args.format == "json":
        payload = [
            {
                "J": list(j),
                "ok": r.ok,
                "witness": None if r.witness is None else list(r.witness),
                "points_checked": r.points_checked,
            }
            for j, r in sorted(results.items())
        ]
        print(jsonio.dumps({"all_ok": all_ok, "subsets": payload}))
    else:
        for j, r in sorted(results.items()):
            status = "PASS" if r.ok else f"FAIL witness={list(r.witness)}"
            print(f"J={list(j)}: {status}")
        print("overall:", "PASS" if all_ok else "FAIL")
    return 0


def _cmd_simplex(args) -> int:
    if args.action != "verify":
        raise CliError("the simplex command supports: verify")
    if args.verbose:
        print("input:")
        print(jsonio.dumps({"dim": args.dim, "samples": args.samples, "seed": args.seed}))
    checks = verify_geometry(args.dim, args.samples, args.seed)
    if args.format == "json":
        print(
            jsonio.dumps(
                [{"name": c.name, "ok": c.ok, "worst": c.worst} for c in checks]
            )
        )
    else:
        for c in checks:
            print(f"{c.name}: {'pass' if c.ok else 'FAIL'} (worst deviation {c.worst:.3e})")
    return 0 if all(c.ok for c in checks) else 1


def _parse_caps(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def _cmd_sweep(args) -> int:
    caps = _parse_caps(args.caps)
    if not caps or min(caps) < 1:
        raise CliError("caps must be positive")
    parts = args.builtin.split(":")
    if parts[0] == "wedge" and len(parts) >= 2 and parts[1] == "countable":
        family = lambda c: wedge_mv_input(c, truncated=True)  # noqa: E731
    elif parts[0] == "zinf" and len(parts) == 2:
        m = int(parts[1])
        family = lambda c: zinf_mv_input(m, c)  # noqa: E731
    else:
        raise CliError(
            f"unknown sweep builtin {args.builtin!r}; expected wedge:countable or zinf:<m>"
        )
    sweep = truncation_sweep(family, caps)
    if args.format == "json":
        print(jsonio.dumps(jsonio.sweep_to_json(sweep)))
    else:
        print(jsonio.sweep_to_table(sweep, verbose=args.verbose))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coarsek",
        description="Exact spectral-sequence calculator for coarse-cover K-theory data",
    )
    parser.add_argument("--format", choices=("table", "json"), default="table")
    parser.add_argument("--period", type=int, choices=(2, 8), default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="build a first page, run to the limit, assemble")
    p_run.add_argument("--builtin")
    p_run.add_argument("--input")
    p_run.add_argument("--cap", type=int)
    p_run.set_defaults(func=_cmd_run)

    p_snf = sub.add_parser("snf", help="Smith normal form with transforms")
    p_snf.add_argument("--matrix", required=True)
    p_snf.set_defaults(func=_cmd_snf)

    p_exc = sub.add_parser("excision", help="brute-force excisiveness check")
    p_exc.add_argument("--builtin")
    p_exc.add_argument("--custom", choices=("disjoint-rays",))
    p_exc.add_argument("--cover")
    p_exc.add_argument("--metric", choices=("d1", "dinf", "weighted"), default="dinf")
    p_exc.add_argument("--weights")
    p_exc.add_argument("--radius", required=True)
    p_exc.add_argument("--s")
    p_exc.add_argument("--box", type=int)
    p_exc.set_defaults(func=_cmd_excision)

    p_sx = sub.add_parser("simplex", help="verify the cake-piece geometry numerically")
    p_sx.add_argument("action", choices=("verify",))
    p_sx.add_argument("--dim", type=int, required=True)
    p_sx.add_argument("--samples", type=int, default=1000)
    p_sx.add_argument("--seed", type=int, dest="seed", default=argparse.SUPPRESS)
    p_sx.set_defaults(func=_cmd_simplex)

    p_sw = sub.add_parser("sweep", help="truncation sweep over caps")
    p_sw.add_argument("--builtin", required=True)
    p_sw.add_argument("--caps", required=True, help="e.g. 1,2,3 or 1..8")
    p_sw.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, SchemaError, AbelianError, AssemblyError, CoarseError, PageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
