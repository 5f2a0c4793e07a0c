"""Command-line interface: ``gsaw <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 resource or time budget exceeded,
4 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import analysis, oracle, sampler
from .algebra import (
    BudgetExceeded,
    RationalGF,
    Series,
    SingularSystemError,
    series_transfer,
    solve_transfer,
    tour_generating_function,
)
from .automaton import AutomatonFormatError, BuildLimitError, WeightedAutomaton, build, load, minimize, save, stream_series
from .weights import RatC

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4
OUT_DIR_ENV = "GSAW_OUTPUT_DIR"

log = logging.getLogger("gsaw")


class Mismatch(Exception):
    pass


def _model(text: str) -> str:
    m = text.replace("-", "_")
    if m not in ("plain", "uniform", "energetic", "greek_key"):
        raise argparse.ArgumentTypeError(f"unknown model {text!r}")
    return m


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _levels(text: str) -> tuple[float, ...]:
    out = []
    for part in text.split(","):
        v = float(part.rstrip("%"))
        if part.endswith("%") or v >= 1:
            v /= 100
        if not 0 < v < 1:
            raise argparse.ArgumentTypeError(f"confidence level {part!r} outside (0, 1)")
        out.append(v)
    return tuple(out)


def _specializations(items: list[str] | None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for item in items or []:
        name, _, value = item.partition("=")
        name = name.strip().lower()
        if name not in ("x", "y", "c") or not value:
            raise ValueError(f"bad specialization {item!r}; use x=1, y=1 or C=<rational>")
        v = Fraction(value)
        if name in ("x", "y") and v != 1:
            raise ValueError("x and y may only be specialized to 1")
        out[name] = v
    return out


def _output_path(arg: str | None, default_name: str) -> Path | None:
    if arg:
        return Path(arg)
    base = os.environ.get(OUT_DIR_ENV)
    return Path(base) / default_name if base else None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text if text.endswith("\n") else text + "\n")
        print(f"wrote {out}", file=sys.stderr)


def _scalar_text(v) -> str:
    if isinstance(v, RatC):
        return repr(v)
    v = Fraction(v)
    return str(v) if v.denominator == 1 else f"{v} (~{float(v):.15g})"


# ---------------------------------------------------------------- automaton sources


def _automaton(args) -> WeightedAutomaton:
    if getattr(args, "fsm", None):
        return load(args.fsm)
    if args.height is None:
        raise ValueError("give --fsm or --height")
    return minimize(build(args.height, args.model))


# ---------------------------------------------------------------- commands


def cmd_build(args) -> int:
    t0 = time.monotonic()
    a = build(args.height, args.model, cap=args.cap, count_only=args.count_only)
    lines = [f"height {args.height}, model {args.model}", f"built:     {a.stats['states']:>10,} states {a.stats['edges']:>12,} edges"]
    if not a.final:
        lines.append("warning: no accepting states; the automaton accepts no walk")
    if args.minimize and not args.count_only:
        m = minimize(a)
        lines.append(f"minimized: {m.num_states:>10,} states {m.num_edges:>12,} edges")
        a = m
    lines.append(f"time: {time.monotonic() - t0:.2f}s")
    print("\n".join(lines))
    out = _output_path(args.out, f"automaton-h{args.height}-{args.model}.json")
    if out is not None and not args.count_only:
        save(a, out)
        print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_gf(args) -> int:
    spec = _specializations(args.specialize)
    if args.mode == "exact":
        a = _automaton(args)
        if "x" in spec or "y" in spec:
            a = minimize(a.specialize(x=1 if "x" in spec else None, y=1 if "y" in spec else None))
        gf = solve_transfer(a, budget=args.budget)
        if "c" in spec:
            gf = gf.subs(c=spec["c"])
        if args.tours:
            if a.model != "greek_key":
                raise ValueError("--tours applies to Greek key automata")
            gf = tour_generating_function(gf)
        doc = {"kind": "gf", "model": a.model, "height": a.height, "specialize": {k: str(v) for k, v in spec.items()}, "gf": gf.to_json()}
        text = json.dumps(doc, indent=1) if args.format == "json" else str(gf)
    else:
        if args.order is None:
            raise ValueError("series mode needs --order")
        grade = args.grade or ("x" if "y" in spec else "y")
        if grade in spec:
            raise ValueError(f"cannot grade by {grade} after specializing it")
        if args.fsm:
            a = load(args.fsm)
            height, model = a.height, a.model
            s = series_transfer(a, args.order, grade)
        else:
            if args.height is None:
                raise ValueError("give --fsm or --height")
            height, model = args.height, args.model
            s = Series(grade, args.order, stream_series(height, model, args.order, grade))
        if "x" in spec or "y" in spec:
            # the remaining variable was set to 1: fold its exponents together
            s = Series(grade, s.order, [{0: sum(d.values())} if d else {} for d in s.coeffs])
        if "c" in spec:
            s = Series(s.grade, s.order, [{e: (v(spec["c"]) if isinstance(v, RatC) else v) for e, v in d.items()} for d in s.coeffs])
        doc = {"kind": "series", "model": model, "height": height, "grade": grade, "series": s.to_json()}
        text = json.dumps(doc, indent=1) if args.format == "json" else str(s)
    _emit(text, _output_path(args.out, f"gf-{args.mode}.json" if args.format == "json" else f"gf-{args.mode}.txt"))
    return EXIT_OK


def _read_gf(path: str) -> RationalGF:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON at byte {e.pos}: {e.msg}") from None
    if isinstance(doc, dict) and "gf" in doc:
        doc = doc["gf"]
    return RationalGF.from_json(doc)


def cmd_stats(args) -> int:
    gf = _read_gf(args.gf)
    variables = tuple(v for v in ("x", "y") if v in gf.variables()) if args.vars is None else tuple(args.vars.split(","))
    rep = analysis.moments(gf, variables)
    if args.format == "json":
        text = json.dumps(rep.to_json(), indent=1)
    else:
        rows = [
            ("E[length]", rep.expected_length),
            ("Var[length]", rep.variance_length),
            ("E[displacement]", rep.expected_displacement),
            ("Var[displacement]", rep.variance_displacement),
        ]
        text = "\n".join(f"{k:<18} {_scalar_text(v)}" for k, v in rows if v is not None)
    _emit(text, _output_path(args.out, "stats.json"))
    return EXIT_OK


def cmd_growth(args) -> int:
    gf = _read_gf(args.gf)
    free = [v for v in gf.variables() if v in ("x", "y")]
    if len(free) > 1:
        keep = args.var or "x"
        gf = gf.subs(**{v: 1 for v in free if v != keep})
    rep = analysis.growth(gf)
    if args.format == "json":
        text = json.dumps(rep.to_json(), indent=1)
    else:
        text = f"alpha {rep.alpha}\nmu    {rep.mu}\nC     {rep.residue_constant}"
    _emit(text, _output_path(args.out, "growth.json"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = sampler.LatticeSpec.parse(args.lattice)
    st = sampler.run_trials(
        spec, args.trials, args.seed, model=args.model, c=args.C, levels=args.levels, shards=args.shards, workers=args.workers
    )
    rows = st.to_rows(spec.label(), args.model)
    if args.format == "json":
        text = json.dumps({"lattice": spec.label(), "model": args.model, "seed": args.seed, "shards": args.shards, "rows": rows}, indent=1)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        lines = [f"{spec.label()} {args.model}: {st.trials:,} walks, E[length] {st.mean_length:.6f}, E[displacement] {st.mean_displacement:.6f}"]
        for r in rows:
            lines.append(
                f"  {r['level'] * 100:g}%: length [{r['ci_length_low']:.6f}, {r['ci_length_high']:.6f}]"
                f"  displacement [{r['ci_displacement_low']:.6f}, {r['ci_displacement_high']:.6f}]"
            )
        if st.aborted:
            lines.append(f"  {st.aborted} walks hit the step cap")
        text = "\n".join(lines)
    _emit(text, _output_path(args.out, f"simulate.{args.format}"))
    return EXIT_OK


def _table_json(table: dict) -> list[dict]:
    rows = []
    for (n, k), v in table.items():
        coeff = v.to_json() if isinstance(v, RatC) else (str(v) if isinstance(v, int) else f"{v.numerator}/{v.denominator}")
        rows.append({"length": n, "displacement": k, "value": coeff})
    return rows


def cmd_oracle(args) -> int:
    if args.tours:
        counts = {n: oracle.enumerate_tours(args.height, n) for n in range(args.max_disp + 1)}
        doc = {"kind": "tours", "rows": args.height, "counts": [{"columns": n, "count": c} for n, c in counts.items()]}
        text = json.dumps(doc, indent=1) if args.format == "json" else " ".join(str(c) for c in counts.values())
    else:
        table = oracle.enumerate_gsaws(args.height, args.max_disp, args.model)
        doc = {"kind": "count_table", "height": args.height, "model": args.model, "max_displacement": args.max_disp, "rows": _table_json(table)}
        text = json.dumps(doc, indent=1) if args.format == "json" else "\n".join(
            f"length {n:>3} displacement {k:>2}: {_scalar_text(v)}" for (n, k), v in table.items()
        )
    _emit(text, _output_path(args.out, "oracle.json"))
    return EXIT_OK


def cmd_verify(args) -> int:
    d = args.max_disp
    if args.fsm:
        a = load(args.fsm)
        height, model = a.height, a.model
        order = d + 1 if model == "greek_key" else d
        coeffs = series_transfer(a, order, "y").coeffs
    else:
        height, model = args.height, args.model
        order = d + 1 if model == "greek_key" else d
        coeffs = stream_series(height, model, order, "y")
    if model == "greek_key":
        cols = order
        got = {n: int(sum(coeffs[n].values())) for n in range(2, cols + 1)}
        want = {n: oracle.enumerate_tours(height, n) for n in range(2, cols + 1)}
        for n in sorted(want):
            if got[n] != want[n]:
                raise Mismatch(f"tours on {height}x{n}: automaton {got[n]}, oracle {want[n]}")
        print(f"ok: Greek key k={height}, tour counts agree for 2..{cols} columns")
        return EXIT_OK
    got = {(e, t): v for t, row in enumerate(coeffs) for e, v in row.items() if v != 0}
    want = oracle.enumerate_gsaws(height, d, model)
    cells = sorted(set(got) | set(want), key=lambda t: (t[1], t[0]))
    for cell in cells:
        g, w = got.get(cell, 0), want.get(cell, 0)
        if g != w:
            raise Mismatch(f"first differing cell (length {cell[0]}, displacement {cell[1]}): automaton {g}, oracle {w}")
    print(f"ok: h={height} {model}, {len(cells)} (length, displacement) cells agree through displacement {d}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsaw", description="Weighted automata for growing self-avoiding walks on strips.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an automaton and report its size")
    b.add_argument("--height", type=_positive, required=True)
    b.add_argument("--model", type=_model, default="plain")
    b.add_argument("--minimize", action="store_true")
    b.add_argument("--count-only", action="store_true", help="count edges without storing them")
    b.add_argument("--cap", type=_positive, default=5_000_000)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    def source(sp):
        sp.add_argument("--fsm", help="automaton JSON written by build")
        sp.add_argument("--height", type=_positive)
        sp.add_argument("--model", type=_model, default="plain")

    g = sub.add_parser("gf", help="exact generating function or truncated series")
    source(g)
    g.add_argument("--mode", choices=("exact", "series"), default="exact")
    g.add_argument("--order", type=_nonneg)
    g.add_argument("--grade", choices=("x", "y"))
    g.add_argument("--specialize", action="append", metavar="VAR=VALUE")
    g.add_argument("--tours", action="store_true", help="Greek key: add the 0- and 1-column tours and count by x")
    g.add_argument("--budget", type=float, help="wall-clock limit for the exact solve, seconds")
    g.add_argument("--format", choices=("json", "text"), help="default: from the --out suffix, else text")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gf)

    s = sub.add_parser("stats", help="means and variances from a probability generating function")
    s.add_argument("--gf", required=True)
    s.add_argument("--vars", help="comma-separated subset of x,y")
    s.add_argument("--format", choices=("json", "text"), help="default: from the --out suffix, else text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    gr = sub.add_parser("growth", help="dominant singularity of a generating function")
    gr.add_argument("--gf", required=True)
    gr.add_argument("--var", choices=("x", "y"))
    gr.add_argument("--format", choices=("json", "text"), help="default: from the --out suffix, else text")
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_growth)

    m = sub.add_parser("simulate", help="Monte Carlo estimates with confidence intervals")
    m.add_argument("--lattice", required=True, help="strip:<h>, quarter, half or full")
    m.add_argument("--model", choices=("uniform", "energetic"), default="uniform")
    m.add_argument("--C", type=float, default=1.0)
    m.add_argument("--trials", type=_positive, required=True)
    m.add_argument("--seed", type=_nonneg, default=0)
    m.add_argument("--levels", type=_levels, default=sampler.DEFAULT_LEVELS)
    m.add_argument("--shards", type=_positive, default=1)
    m.add_argument("--workers", type=_positive, default=1)
    m.add_argument("--format", choices=("json", "csv", "text"), help="default: from the --out suffix, else text")
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    o = sub.add_parser("oracle", help="brute-force enumeration")
    o.add_argument("--height", type=_positive, required=True)
    o.add_argument("--max-disp", type=_nonneg, required=True, help="displacement bound (columns with --tours)")
    o.add_argument("--model", choices=("plain", "uniform", "energetic"), default="plain")
    o.add_argument("--tours", action="store_true", help="count Greek key tours on height x n grids instead")
    o.add_argument("--format", choices=("json", "text"), help="default: from the --out suffix, else text")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="compare automaton series with the oracle")
    source(v)
    v.add_argument("--max-disp", type=_nonneg, required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = parser().parse_args(argv)
    if getattr(args, "format", "") is None:
        suffix = Path(args.out).suffix.lstrip(".") if getattr(args, "out", None) else ""
        args.format = suffix if suffix == "json" or (suffix == "csv" and args.command == "simulate") else "text"
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "verify" and not args.fsm and args.height is None:
        print("error: give --fsm or --height", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except Mismatch as e:
        print(f"mismatch: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (BuildLimitError, BudgetExceeded) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, AutomatonFormatError, SingularSystemError, oracle.OracleGuardError, FileNotFoundError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
