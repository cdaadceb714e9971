"""Command-line interface: state files and Schmidt vectors in, tables out.

Exit codes: 0 success, 1 computation error, 2 bad input, 3 reproduction-suite
failure.  Every subcommand takes --json FILE for machine-readable output
including any witness certificates; rates are printed as exact "log2 k"
strings so the floor-log quantities are unambiguous.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import distill, monotones, special, verify
from .bipartite import random_state, schmidt_vector_from_squares
from .distill import OperationClass
from .hyptest import d_h_min_witness
from .sets import IntractableSetError, OperatorSet
from .solver import SolverError
from .stateio import StateFormatError, load_state, matrix_to_json, save_state

_SET_TOKENS = {
    "sep": OperatorSet.SEP,
    "ppt": OperatorSet.PPT,
    "pptplus": OperatorSet.PPT_PLUS,
    "ppt+": OperatorSet.PPT_PLUS,
    "pptprime": OperatorSet.PPT_PRIME,
    "ppt-prime": OperatorSet.PPT_PRIME,
    "rains": OperatorSet.RAINS,
    "incoherent": OperatorSet.INCOHERENT,
}

_SET_CHOICES = ("sep", "ppt", "pptplus", "pptprime", "rains", "incoherent")
_CLASS_CHOICES = tuple(oc.value for oc in OperationClass)
_KIND_CHOICES = ("haar_pure", "ginibre_mixed", "isotropic", "max_correlated")


def _print_rows(rows: list[tuple[str, object]]) -> None:
    width = max(len(key) for key, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")


def _write_json(path: str | None, payload: dict) -> None:
    if path is None:
        return
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _certificate_json(cert) -> list | None:
    return None if cert is None else matrix_to_json(cert.mat)


def _rate_rows(res: distill.DistillationResult) -> list[tuple[str, object]]:
    rows = [("rate", f"log2 {res.m}"), ("bits", f"{res.value:.6f}"), ("m", res.m)]
    if res.is_lower_bound:
        rows.append(("bound", "lower bound (exact value may be larger)"))
    return rows


def _result_payload(res: distill.DistillationResult, **extra) -> dict:
    payload = {
        "quantity": res.quantity,
        "class": res.operation_class.value,
        "value": res.value,
        "m": res.m,
        "method": res.method,
        "is_lower_bound": res.is_lower_bound,
        "diagnostics": res.diagnostics,
        "certificate": _certificate_json(res.certificate),
    }
    payload.update(extra)
    return payload


def _cmd_fidelity(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    res = distill.fidelity(rho, OperationClass(args.op_class), args.m)
    rows = [("quantity", "fidelity"), ("class", args.op_class), ("m", args.m),
            ("value", f"{res.value:.8f}"), ("method", res.method)]
    if res.is_lower_bound:
        rows.append(("bound", "lower bound (exact value may be larger)"))
    _print_rows(rows)
    _write_json(args.json, _result_payload(res))
    return 0


def _cmd_rate(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    res = distill.rate_eps(rho, OperationClass(args.op_class), args.eps)
    _print_rows([("quantity", "rate_eps"), ("class", args.op_class),
                 ("eps", args.eps)] + _rate_rows(res))
    _write_json(args.json, _result_payload(res, eps=args.eps))
    return 0


def _cmd_rate0(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    res = distill.rate_zero_error(rho, OperationClass(args.op_class))
    _print_rows([("quantity", "rate_zero_error"), ("class", args.op_class)]
                + _rate_rows(res))
    _write_json(args.json, _result_payload(res))
    return 0


def _parse_schmidt(text: str) -> np.ndarray:
    try:
        squares = np.array([float(tok) for tok in text.split(",") if tok.strip()])
    except ValueError:
        raise ValueError(f"--schmidt expects comma-separated numbers, got {text!r}") from None
    if squares.size == 0 or np.any(squares < 0.0):
        raise ValueError("--schmidt needs a non-empty list of non-negative squares")
    total = float(squares.sum())
    if total <= 0.0:
        raise ValueError("--schmidt squares must not all be zero")
    if abs(total - 1.0) > 1e-6:
        print(f"warning: squared coefficients sum to {total:.8f}; renormalizing",
              file=sys.stderr)
    return squares / total


def _cmd_norm(args: argparse.Namespace) -> int:
    xi = schmidt_vector_from_squares(_parse_schmidt(args.schmidt))
    res = special.m_distillation_norm(xi, args.m)
    head, tail = res.split
    _print_rows([
        ("norm", f"{res.value:.6f}"),
        ("k_star", res.k_star),
        ("head_l1", f"{head:.6f}"),
        ("tail_l2", f"{tail:.6f}"),
    ])
    _write_json(args.json, {
        "quantity": "m_distillation_norm",
        "m": args.m,
        "value": res.value,
        "k_star": res.k_star,
        "head_l1": head,
        "tail_l2": tail,
    })
    return 0


def _cmd_monotone(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    measure = args.measure
    needs_set = measure != "negativity"
    if needs_set and args.set is None:
        raise ValueError(f"--set is required for measure {measure!r}")
    if measure in ("tm", "gm") and args.m is None:
        raise ValueError(f"--m is required for measure {measure!r}")
    s = _SET_TOKENS[args.set] if needs_set else None
    if measure == "tm":
        value = monotones.t_m(rho, s, args.m)
    elif measure == "gm":
        value = monotones.g_m(rho, s, args.m)
    elif measure == "robustness":
        value = monotones.robustness(rho, s)
    elif measure == "mtd":
        value = monotones.mod_trace_distance(rho, s)
    else:
        value = monotones.negativity(rho)
    rows = [("measure", measure)]
    if needs_set:
        rows.append(("set", args.set))
    if args.m is not None and measure in ("tm", "gm"):
        rows.append(("m", args.m))
    rows.append(("value", f"{value:.8f}"))
    _print_rows(rows)
    _write_json(args.json, {
        "quantity": measure,
        "set": args.set if needs_set else None,
        "m": args.m if measure in ("tm", "gm") else None,
        "value": value,
    })
    return 0


def _cmd_dh(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    res = d_h_min_witness(rho, _SET_TOKENS[args.set], args.eps)
    bits = "inf" if np.isinf(res.bits) else f"{res.bits:.8f}"
    _print_rows([
        ("quantity", "min D_H over set"),
        ("set", args.set),
        ("eps", args.eps),
        ("bits", bits),
        ("type2_optimum", f"{res.gauge_value:.10f}"),
    ])
    _write_json(args.json, {
        "quantity": "d_h_min",
        "set": args.set,
        "eps": args.eps,
        "bits": None if np.isinf(res.bits) else res.bits,
        "type2_optimum": res.gauge_value,
        "witness": matrix_to_json(res.witness.mat),
        "optimal_x": matrix_to_json(res.optimal_x.mat),
    })
    return 0


def _cmd_random(args: argparse.Namespace) -> int:
    d_b = args.db if args.db is not None else args.d
    rho = random_state(args.kind, (args.d, d_b), args.seed, f=args.f, rank=args.rank)
    save_state(args.out, rho)
    _print_rows([
        ("kind", args.kind),
        ("d_a", rho.d_a),
        ("d_b", rho.d_b),
        ("seed", args.seed),
        ("negativity", f"{monotones.negativity(rho):.8f}"),
        ("written", args.out),
    ])
    _write_json(args.json, {
        "kind": args.kind, "d_a": rho.d_a, "d_b": rho.d_b,
        "seed": args.seed, "path": args.out,
    })
    return 0


def _cmd_reproduce(args: argparse.Namespace) -> int:
    report = verify.run_repro_suite(args.suite, d=args.d, seed=args.seed, jobs=args.jobs)
    for case in report.cases:
        tag = "PASS" if case.passed else "FAIL"
        print(f"{tag}  {case.description:<70s} expected {case.expected:>12.8g}  "
              f"computed {case.computed:>12.8g}  [{case.kind}]")
    n_pass = len(report.cases) - len(report.failures)
    print(f"suite {report.suite}: {n_pass}/{len(report.cases)} cases passed (seed {report.seed})")
    _write_json(args.json, report.to_json())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["description", "expected", "computed", "tolerance", "kind", "pass"])
            for case in report.cases:
                writer.writerow([case.description, case.expected, case.computed,
                                 case.tolerance, case.kind, case.passed])
    return 0 if report.passed else 3


def _add_state_json(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", required=True, help="state JSON file")
    parser.add_argument("--json", metavar="FILE", help="write machine-readable result here")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qedist",
        description="One-shot entanglement distillation quantities as convex programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="distillation fidelity F(rho, m)")
    p.add_argument("--class", dest="op_class", required=True, choices=_CLASS_CHOICES)
    p.add_argument("--m", type=int, required=True, help="target entanglement level m")
    _add_state_json(p)
    p.set_defaults(func=_cmd_fidelity)

    p = sub.add_parser("rate", help="one-shot eps-error distillable entanglement")
    p.add_argument("--class", dest="op_class", required=True, choices=_CLASS_CHOICES)
    p.add_argument("--eps", type=float, required=True, help="error tolerance in [0, 1)")
    _add_state_json(p)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("rate0", help="zero-error distillable entanglement")
    p.add_argument("--class", dest="op_class", required=True, choices=_CLASS_CHOICES)
    _add_state_json(p)
    p.set_defaults(func=_cmd_rate0)

    p = sub.add_parser("norm", help="m-distillation norm of a Schmidt vector")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--schmidt", required=True,
                   help="comma-separated squared Schmidt coefficients")
    p.add_argument("--json", metavar="FILE")
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("monotone", help="entanglement monotones")
    p.add_argument("--measure", required=True,
                   choices=("tm", "gm", "robustness", "negativity", "mtd"))
    p.add_argument("--set", choices=_SET_CHOICES, help="operator set S")
    p.add_argument("--m", type=float, help="strength parameter for tm/gm")
    _add_state_json(p)
    p.set_defaults(func=_cmd_monotone)

    p = sub.add_parser("dh", help="hypothesis-testing relative entropy minimised over a set")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--set", required=True, choices=_SET_CHOICES)
    _add_state_json(p)
    p.set_defaults(func=_cmd_dh)

    p = sub.add_parser("random", help="write a seeded random state to a JSON file")
    p.add_argument("--kind", required=True, choices=_KIND_CHOICES)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output state file")
    p.add_argument("--d", type=int, default=2, help="local dimension (d_a)")
    p.add_argument("--db", type=int, help="second local dimension (defaults to --d)")
    p.add_argument("--f", type=float, help="fidelity parameter for isotropic states")
    p.add_argument("--rank", type=int, help="rank for ginibre/max-correlated states")
    p.add_argument("--json", metavar="FILE")
    p.set_defaults(func=_cmd_random)

    p = sub.add_parser("reproduce", help="run a named verification suite")
    p.add_argument("--suite", required=True, choices=verify.SUITES)
    p.add_argument("--d", type=int, help="local dimension (suite default if omitted)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    p.add_argument("--json", metavar="FILE")
    p.add_argument("--csv", metavar="FILE", help="write the case table as CSV")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IntractableSetError as exc:
        print(f"qedist: computation unavailable: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"qedist: computation failed: {exc}", file=sys.stderr)
        return 1
    except (StateFormatError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"qedist: bad input: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"qedist: bad input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
