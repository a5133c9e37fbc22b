"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 regression
against the reference SNS costs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analysis
from .errors import DomainError, InputError, NumericalError
from .hmm import dump_spec, load_spec, validate_spec
from .quantum import encoding_from_name
from .renewal import RenewalFamily, build_sns_A, predictive_generator, retrodictive_generator
from .serialize import sig

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_REGRESSION = 0, 1, 2, 3


def _fmt3(x: float) -> str:
    return f"{x:.3g}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _load_generator(path: str):
    try:
        return validate_spec(load_spec(path))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def bundle_text(b: analysis.AnalysisBundle) -> str:
    c, q = b.classical, b.quantum
    rows = [
        f"generator: {b.name}  states: {b.n_states} (input {b.n_states_input})  "
        f"unifilar: {b.is_unifilar}  retrodictive: {b.is_retrodictive}",
        f"h_mu = {_fmt3(b.h_mu)} bits/step ({b.h_mu_method})",
        f"{'':10}{'D':>8}{'C':>8}{'W':>8}{'excess':>8}",
        f"{'classical':10}{_fmt3(c.D):>8}{_fmt3(c.C):>8}{_fmt3(c.W):>8}{_fmt3(c.dissipation):>8}",
        f"{'quantum':10}{_fmt3(q.D):>8}{_fmt3(q.C):>8}{_fmt3(q.W):>8}{_fmt3(q.dissipation):>8}",
        "checks: " + ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in b.checks.items()),
    ]
    return "\n".join(rows) + "\n"


def cmd_analyze(args) -> int:
    gen = _load_generator(args.spec)
    bundle = analysis.analyze(
        gen, encoding_from_name(args.encoding), name=args.spec, L_max=args.L_max
    )
    data = bundle.to_dict()
    data["config"]["spec"] = args.spec
    if args.format == "json":
        _emit(_dumps(data), args.out)
    else:
        sys.stdout.write(bundle_text(bundle))
        if args.out:
            Path(args.out).write_text(_dumps(data), encoding="utf-8")
    return EXIT_OK


def table1_text(result: dict) -> str:
    g = result["grid"]
    lines = [f"SNS costs at p = {result['p']} (N = {result['N']})", f"{'':3}{'classical':>24}{'quantum':>24}"]
    for name in "ABC":
        cl = f"C={_fmt3(g[f'C_c{name}'])}, W={_fmt3(g[f'W_c{name}'])}"
        qu = f"C={_fmt3(g[f'C_q{name}'])}, W={_fmt3(g[f'W_q{name}'])}"
        lines.append(f"{name:3}{cl:>24}{qu:>24}")
    lines.append(f"h_mu = {_fmt3(result['h_mu'])}")
    if result["deviations"]:
        worst = max(abs(v) for v in result["deviations"].values())
        status = "matches" if result["matches_reference"] else "DEVIATES FROM"
        lines.append(f"{status} reference values (max deviation {worst:.2e})")
    return "\n".join(lines) + "\n"


def cmd_table1(args) -> int:
    result = analysis.table1(args.p, args.N)
    if args.format == "json":
        payload = {
            "config": {"p": args.p, "N": args.N},
            "N": result["N"],
            "grid": {k: sig(v) for k, v in result["grid"].items()},
            "h_mu": sig(result["h_mu"]),
            "deviations": {k: sig(v) for k, v in result["deviations"].items()},
            "matches_reference": result["matches_reference"],
            "checks": result["checks"],
        }
        _emit(_dumps(payload), args.out)
    else:
        _emit(table1_text(result), args.out)
    checks_ok = all(all(c.values()) for c in result["checks"].values())
    if not result["matches_reference"] or not checks_ok:
        return EXIT_REGRESSION
    return EXIT_OK


def cmd_sweep(args) -> int:
    ps = analysis.p_grid(args.p_min, args.p_max, args.step)
    for p in ps:
        if not 0 < p < 1:
            raise DomainError(f"p={p} outside (0, 1)")
    rows = analysis.sweep(ps, args.N, jobs=args.jobs)
    keep = ["p", "N"] + [
        c for c in analysis.SWEEP_COLUMNS[2:] if c == "h_mu" or c[-1] in args.generators
    ]
    rows = [{k: (r[k] if k in ("p", "N") else sig(r[k])) for k in keep} for r in rows]
    if args.format == "json":
        _emit(_dumps({"config": vars_config(args), "rows": rows}), args.out)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keep, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    gen = _load_generator(args.spec)
    report = analysis.verify(
        gen, encoding_from_name(args.encoding), L_max=args.L_max, samples=args.samples, seed=args.seed
    )
    report["config"]["spec"] = args.spec
    if args.format == "json":
        _emit(_dumps(report), args.out)
    else:
        lines = [
            f"spec: {args.spec}",
            f"max exact deviation (L <= {args.L_max}): {report['exact_max_deviation']:.3e}",
            f"channel residual: {report['channel_residual']:.3e}",
            f"isometry residual: {report['isometry_residual']:.3e}",
            f"spectrum residual: {report['spectrum_residual']:.3e}",
        ]
        if "sampled" in report:
            s = report["sampled"]
            lines.append(
                f"sampled ({s['windows']} windows, length {s['length']}): max deviation "
                f"{s['max_deviation']:.3e}, interval half-width {s['max_half_width']:.3e}, "
                f"within: {s['within_interval']}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sns(args) -> int:
    if args.generator == "A":
        gen = build_sns_A(args.p)
    else:
        fam = RenewalFamily.sns(args.p, args.N)
        gen = predictive_generator(fam) if args.generator == "B" else retrodictive_generator(fam)
    if args.out:
        dump_spec(gen.spec, args.out)
    else:
        sys.stdout.write(gen.spec.to_json() + "\n")
    return EXIT_OK


def vars_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "out")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmmq", description="Memory and work costs of classical vs quantum HMM implementations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse a generator spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--encoding", choices=["end-state", "phase"], default="end-state")
    p.add_argument("--L-max", dest="L_max", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("table1", help="SNS cost grid, checked against the reference values at p=0.5")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="SNS costs over a range of p (CSV)")
    p.add_argument("--p-min", type=float, default=0.1)
    p.add_argument("--p-max", type=float, default=0.95)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--generators", default="ABC")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-check the quantum channel against word statistics")
    p.add_argument("--spec", required=True)
    p.add_argument("--encoding", choices=["end-state", "phase"], default="end-state")
    p.add_argument("--L-max", dest="L_max", type=int, default=6)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sns", help="emit an SNS generator spec as JSON")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--generator", choices=["A", "B", "C"], required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sns)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
