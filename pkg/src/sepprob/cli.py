"""Command-line interface.

Subcommands mirror the library surface: ``mc estimate``, ``mc moments``,
``reconstruct``, ``hyper eval``, ``hyper family``, ``formula eval``,
``formula fit``, ``recognize``, ``fitline``, ``table check`` and
``verify``.  Exit codes are stable per failure class: 2 for input errors
(including argparse rejections), 3 for numerical failures, 4 for
verification failures.  Every invocation that writes output files also
writes a ``<command>-manifest.json`` recording inputs, outputs, digests
and seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from mpmath import mp

from .constants import ConstantTable, builtin_table
from .errors import InputError, NumericalFailureError, SepprobError, VerificationFailureError
from .formula import FitProblem, FormulaConfig, assemble_P, fit_formula
from .hyper import HypergeometricSpec, family_member_eval, pfq_eval
from .kernel import format_rational, parse_rational
from .manifest import RunManifest
from .moments import load_moment_file
from .recognize import recognize_affine, to_rational
from .reconstruct import EXACT, FloatMode, convergence_trace
from .sampler import Ring, empirical_moments, mc_separability
from .tables import ProbabilityTable, fitline, table_check


def _write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=1)
        f.write("\n")


def _rational_list(text: str) -> list[Fraction]:
    items = [t for t in text.split(",") if t.strip()]
    return [parse_rational(t.strip()) for t in items]


# ---------------------------------------------------------------------------
# Subcommand handlers.

def cmd_mc_estimate(args) -> int:
    ring = Ring.from_name(args.ensemble)
    result = mc_separability(ring, args.samples, args.seed, args.threads)
    payload = result.to_json_dict()
    print(
        f"{ring.ensemble_name}: estimate={result.estimate:.6f} "
        f"std_error={result.std_error:.2e} samples={result.samples}"
    )
    if args.out:
        _write_json(args.out, payload)
        manifest = RunManifest("mc estimate", vars(args) | {"func": None})
        manifest.add_output(args.out)
        manifest.write()
    return 0


def cmd_mc_moments(args) -> int:
    ring = Ring.from_name(args.ensemble)
    table = empirical_moments(ring, args.samples, args.max_n, args.max_k,
                              args.seed, args.threads)
    payload = table.to_json_dict()
    print(
        f"{ring.ensemble_name}: moments up to ({args.max_n}, {args.max_k}) "
        f"from {args.samples} samples; det_pt range "
        f"[{table.det_pt_range[0]:.4e}, {table.det_pt_range[1]:.4e}]"
    )
    if args.out:
        _write_json(args.out, payload)
        manifest = RunManifest("mc moments", vars(args) | {"func": None})
        manifest.add_output(args.out)
        manifest.write()
    return 0


def _trace_degrees(top: int) -> list[int]:
    degrees = [0]
    d = 1
    while d < top:
        degrees.append(d)
        d *= 2
    if top > 0:
        degrees.append(top)
    return degrees


def cmd_reconstruct(args) -> int:
    mode = EXACT if args.mode == "exact" else FloatMode(args.digits)
    seq = load_moment_file(args.moments, allow_decimal=(args.mode == "float"))
    for warning in seq.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    trace = convergence_trace(seq, _trace_degrees(args.degree), mode)
    final = trace.estimates[-1]
    if isinstance(final, Fraction):
        print(f"degree {args.degree}: {format_rational(final)}")
    else:
        print(f"degree {args.degree}: {mp.nstr(final, min(args.digits, 30))}")
    if args.trace:
        with open(args.trace, "w") as f:
            f.write(trace.to_csv())
        manifest = RunManifest("reconstruct", vars(args) | {"func": None})
        manifest.add_input(args.moments)
        manifest.add_output(args.trace)
        manifest.write()
    return 0


def _print_bounded(value) -> None:
    payload = {
        "midpoint": mp.nstr(value.midpoint, mp.dps),
        "radius": mp.nstr(value.radius, 5),
    }
    if value.exact is not None:
        payload["exact"] = format_rational(value.exact)
    print(json.dumps(payload, indent=1))


def cmd_hyper_eval(args) -> int:
    spec = HypergeometricSpec(
        upper=_rational_list(args.upper),
        lower=_rational_list(args.lower) if args.lower else [],
        z=parse_rational(args.z),
    )
    value = pfq_eval(spec, args.digits)
    with mp.workdps(args.digits + 5):
        _print_bounded(value)
    return 0


def cmd_hyper_family(args) -> int:
    value = family_member_eval(parse_rational(args.alpha), args.k, args.digits)
    with mp.workdps(args.digits + 5):
        _print_bounded(value)
    return 0


def cmd_formula_eval(args) -> int:
    config = FormulaConfig.load(args.config)
    value = assemble_P(config, parse_rational(args.alpha), args.digits)
    with mp.workdps(args.digits + 5):
        _print_bounded(value)
    return 0


def cmd_formula_fit(args) -> int:
    table = ProbabilityTable.load(args.table)
    hold_half = args.holdout == "half-integers"
    samples, holdout = [], []
    for row in table.rows:
        is_half = row.alpha.denominator == 2
        if is_half == hold_half:
            holdout.append((row.alpha, row.value))
        else:
            samples.append((row.alpha, row.value))
    problem = FitProblem(samples=samples, ansatz_degree=args.ansatz_degree, holdout=holdout)
    report = fit_formula(problem, args.digits)
    summary = report.to_json_dict() | {
        "fit_rows": len(samples),
        "holdout_rows": len(holdout),
    }
    print(json.dumps(summary, indent=1))
    if args.out:
        report.config.save(args.out)
        manifest = RunManifest("formula fit", vars(args) | {"func": None})
        manifest.add_input(args.table)
        manifest.add_output(args.out)
        manifest.write()
    return 0


def cmd_recognize(args) -> int:
    text = args.value
    if os.path.exists(text):
        text = Path(text).read_text().strip()
    table = ConstantTable.from_file(args.constants) if args.constants else builtin_table()
    from .kernel import parse_decimal

    _, sig = parse_decimal(text)
    if args.digits_required and sig < args.digits_required:
        raise InputError(
            f"input carries {sig} significant digits; {args.digits_required} required"
        )
    if args.constant:
        a_candidates = _rational_list(args.a_candidates)
        cand = recognize_affine(text, args.constant, a_candidates, args.max_den, table)
    else:
        cand = to_rational(text, args.max_den)
    if cand is None:
        print(json.dumps({"form": "none"}))
    else:
        print(json.dumps(cand.to_json_dict(), indent=1))
    return 0


def cmd_fitline(args) -> int:
    table = ProbabilityTable.load(args.table)
    fit = fitline(table)
    print(f"slope: {fit.slope!r}")
    manifest = RunManifest("fitline", vars(args) | {"func": None})
    manifest.add_input(args.table)
    if args.out_csv:
        with open(args.out_csv, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["alpha", "ln_value", "fitted", "residual"])
            for (alpha, lny), fitted, residual in zip(fit.points, fit.fitted, fit.residuals):
                writer.writerow([repr(alpha), repr(lny), repr(fitted), repr(residual)])
        manifest.add_output(args.out_csv)
    if args.out_svg:
        from .svgplot import scatter_with_line

        xs = [a for a, _ in fit.points]
        line = [(min(xs), fit.slope * min(xs)), (max(xs), fit.slope * max(xs))]
        svg = scatter_with_line(
            fit.points, line,
            title=f"log probabilities vs alpha (slope {fit.slope:.6f})",
            xlabel="alpha", ylabel="ln P",
        )
        Path(args.out_svg).write_text(svg)
        manifest.add_output(args.out_svg)
    if args.out_csv or args.out_svg:
        manifest.write()
    return 0


def cmd_table_check(args) -> int:
    table = ProbabilityTable.load(args.table)
    report = table_check(table)
    mismatched = 0
    for row in report:
        line = f"alpha={row['alpha']:>6}  {row['rendered']:>12}  {row['status']}"
        if row["status"] == "MISMATCH":
            mismatched += 1
            line += f"  (printed form: {row['printed']})"
        print(line)
    if mismatched:
        raise VerificationFailureError(f"{mismatched} row(s) disagree with the printed decimals")
    return 0


def cmd_verify(args) -> int:
    table = ProbabilityTable.load(args.table) if args.table else ProbabilityTable.reference()
    rows = []
    failures = 0
    for ring in (Ring.REAL, Ring.COMPLEX, Ring.QUATERNION):
        target = table.value_at(ring.alpha)
        if target is None:
            rows.append({"ensemble": ring.ensemble_name, "status": "SKIPPED",
                         "reason": f"table has no alpha = {format_rational(ring.alpha)} row"})
            print(f"{ring.ensemble_name}: SKIPPED (no table row)")
            continue
        result = mc_separability(ring, args.samples, args.seed, args.threads)
        dev = abs(result.estimate - float(target))
        bound = 3.0 * result.std_error
        low_power = bound > 0.1 * float(target)
        status = "PASS" if dev <= bound else "FAIL"
        if low_power:
            status = "LOW_POWER"
        rows.append({
            "ensemble": ring.ensemble_name,
            "alpha": format_rational(ring.alpha),
            "target": format_rational(target),
            "estimate": result.estimate,
            "std_error": result.std_error,
            "samples": result.samples,
            "deviation": dev,
            "three_sigma": bound,
            "status": status,
        })
        print(
            f"{ring.ensemble_name}: estimate={result.estimate:.6f} "
            f"target={float(target):.6f} |dev|={dev:.2e} 3se={bound:.2e} -> {status}"
        )
        if status == "FAIL":
            failures += 1
    payload = {"samples": args.samples, "seed": args.seed, "rows": rows}
    if args.out:
        _write_json(args.out, payload)
        manifest = RunManifest("verify", vars(args) | {"func": None})
        if args.table:
            manifest.add_input(args.table)
        manifest.add_output(args.out)
        manifest.write()
    if failures:
        raise VerificationFailureError(f"{failures} ensemble(s) deviate beyond 3 standard errors")
    return 0


# ---------------------------------------------------------------------------
# Parser wiring.

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepprob",
        description="Separability probabilities: Monte Carlo, moment reconstruction, "
                    "hypergeometric families and exact-value recognition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mc = sub.add_parser("mc", help="Monte Carlo over random density matrices")
    mcsub = mc.add_subparsers(dest="subcommand", required=True)
    est = mcsub.add_parser("estimate", help="estimate P(det rho_PT >= 0)")
    est.add_argument("--ensemble", required=True, help="rebit, qubit or quabit")
    est.add_argument("--samples", type=int, default=4_000_000)
    est.add_argument("--seed", type=int, default=2024)
    est.add_argument("--threads", type=int, default=1)
    est.add_argument("--out", help="write the result JSON here")
    est.set_defaults(func=cmd_mc_estimate)
    mom = mcsub.add_parser("moments", help="empirical bivariate determinant moments")
    mom.add_argument("--ensemble", required=True)
    mom.add_argument("--samples", type=int, default=1_000_000)
    mom.add_argument("--max-n", type=int, default=2)
    mom.add_argument("--max-k", type=int, default=1)
    mom.add_argument("--seed", type=int, default=2024)
    mom.add_argument("--threads", type=int, default=1)
    mom.add_argument("--out", help="write the moment table JSON here")
    mom.set_defaults(func=cmd_mc_moments)

    rec = sub.add_parser("reconstruct", help="Legendre reconstruction from a moment file")
    rec.add_argument("--moments", required=True)
    rec.add_argument("--degree", type=int, required=True)
    rec.add_argument("--mode", choices=["exact", "float"], default="exact")
    rec.add_argument("--digits", type=int, default=50, help="float-mode reported digits")
    rec.add_argument("--trace", help="write a degree/estimate CSV here")
    rec.set_defaults(func=cmd_reconstruct)

    hyp = sub.add_parser("hyper", help="hypergeometric series evaluation")
    hypsub = hyp.add_subparsers(dest="subcommand", required=True)
    heval = hypsub.add_parser("eval", help="evaluate a pFq series")
    heval.add_argument("--upper", required=True, help="comma-separated rationals")
    heval.add_argument("--lower", default="", help="comma-separated rationals")
    heval.add_argument("--z", required=True)
    heval.add_argument("--digits", type=int, default=50)
    heval.set_defaults(func=cmd_hyper_eval)
    hfam = hypsub.add_parser("family", help="evaluate a 7F6 family member")
    hfam.add_argument("--alpha", required=True)
    hfam.add_argument("--k", type=int, required=True)
    hfam.add_argument("--digits", type=int, default=50)
    hfam.set_defaults(func=cmd_hyper_family)

    form = sub.add_parser("formula", help="affine-plus-weights formula configs")
    formsub = form.add_subparsers(dest="subcommand", required=True)
    feval = formsub.add_parser("eval", help="evaluate a config at one alpha")
    feval.add_argument("--config", required=True)
    feval.add_argument("--alpha", required=True)
    feval.add_argument("--digits", type=int, default=50)
    feval.set_defaults(func=cmd_formula_eval)
    ffit = formsub.add_parser("fit", help="fit a config to a probability table")
    ffit.add_argument("--table", required=True)
    ffit.add_argument("--ansatz-degree", type=int, required=True)
    ffit.add_argument("--holdout", choices=["integers", "half-integers"],
                      default="half-integers")
    ffit.add_argument("--digits", type=int, default=60)
    ffit.add_argument("--out", help="write the fitted config JSON here")
    ffit.set_defaults(func=cmd_formula_fit)

    recog = sub.add_parser("recognize", help="recognize exact forms in decimals")
    recog.add_argument("--value", required=True, help="decimal literal or path to a file holding one")
    recog.add_argument("--max-den", type=int, default=10 ** 12)
    recog.add_argument("--constant", help="affine recognition against this named constant")
    recog.add_argument("--a-candidates", default="2,0",
                       help="comma-separated rational candidates for the affine term")
    recog.add_argument("--constants", help="path to a constants JSON overriding the builtin table")
    recog.add_argument("--digits-required", type=int, default=0)
    recog.set_defaults(func=cmd_recognize)

    fl = sub.add_parser("fitline", help="origin-constrained slope of ln(value) vs alpha")
    fl.add_argument("--table", required=True)
    fl.add_argument("--out-csv")
    fl.add_argument("--out-svg")
    fl.set_defaults(func=cmd_fitline)

    tab = sub.add_parser("table", help="probability-table utilities")
    tabsub = tab.add_subparsers(dest="subcommand", required=True)
    tcheck = tabsub.add_parser("check", help="compare renderings with the printed reference decimals")
    tcheck.add_argument("--table", required=True)
    tcheck.set_defaults(func=cmd_table_check)

    ver = sub.add_parser("verify", help="Monte Carlo verification against a table")
    ver.add_argument("--samples", type=int, default=4_000_000)
    ver.add_argument("--seed", type=int, default=2024)
    ver.add_argument("--threads", type=int, default=1)
    ver.add_argument("--table", help="probability table (defaults to the builtin reference rows)")
    ver.add_argument("--out", help="write the verdict JSON here")
    ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except VerificationFailureError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 4
    except SepprobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
