"""Command line front end.

Subcommands: verify (identity-check families), simulate (Bernoulli noise
Gram/moment checks), apply (operator expression to a functional), norms,
qms (generator application). Exit codes: 0 everything passed, 1 at least
one genuine check failed, 2 configuration or input error. All reports are
JSON with sorted keys; wall-clock data lives in a single "timing" field so
that two runs with the same config and seed agree byte for byte elsewhere.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .functionals import Functional
from .martingale import (
    BernoulliParams,
    conditional_moments,
    exact_gram,
    monte_carlo_gram,
)
from .operators import parse_expr
from .qms import GeneratorSpec, generator_apply, matrix_from_json, matrix_to_json
from .reports import all_ok, format_line, run_to_json
from .verifier import DEFAULT_TOLERANCE, FAMILY_NAMES, run_all
from .weights import Weight2D


class ConfigError(Exception):
    """Bad flags, unreadable files, malformed JSON: exit code 2."""


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise ConfigError(f"cannot write {out}: {exc}") from exc
    else:
        print(text)


def _say(message: str) -> None:
    # Human-readable progress goes to stderr so stdout stays valid JSON.
    print(message, file=sys.stderr)


def cmd_verify(args) -> int:
    only = None
    if args.only:
        only = [name for chunk in args.only for name in chunk.split(",") if name]
    weight = Weight2D.from_json(_load_json(args.weight)) if args.weight else None
    try:
        reports, timings = run_all(
            n=args.n,
            seed=args.seed,
            tolerance=args.tol,
            only=only,
            weight_override=weight,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for rep in reports:
        _say(format_line(rep))
    config = {
        "command": "verify",
        "n": args.n,
        "seed": args.seed,
        "tolerance": args.tol,
        "only": only,
        "weight": args.weight,
    }
    payload = run_to_json(reports, config, timings)
    _emit(payload, args.out)
    bad = payload["counts"]["not_ok"]
    _say(f"{len(reports) - bad}/{len(reports)} checks ok")
    return 0 if all_ok(reports) else 1


def _theta_params(raw: str, n: int) -> BernoulliParams:
    try:
        theta = float(raw)
    except ValueError:
        data = _load_json(raw)
        if isinstance(data, list):
            data = {"thetas": data}
        try:
            params = BernoulliParams.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad theta file {raw}: {exc}") from exc
        if params.n != n:
            raise ConfigError(
                f"theta file provides {params.n} steps but --n is {n}"
            )
        return params
    try:
        return BernoulliParams.constant(theta, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_simulate(args) -> int:
    if args.exact and args.samples is not None:
        raise ConfigError("choose either --exact or --samples, not both")
    params = _theta_params(args.theta, args.n)
    size = 1 << params.n
    eye = np.eye(size)
    started = time.perf_counter()
    try:
        if args.samples is None:
            gram = exact_gram(params)
            moments = conditional_moments(params)
            gram_dev = float(np.abs(gram - eye).max())
            passed = (
                gram_dev <= args.tol
                and moments.max_mean_dev <= args.tol
                and moments.max_second_dev <= args.tol
            )
            body = {
                "mode": "exact",
                "gram_deviation": gram_dev,
                "moments": moments.to_json(),
            }
        else:
            if args.samples <= 0:
                raise ConfigError("--samples must be positive")
            gram, stderr = monte_carlo_gram(params, args.samples, args.seed)
            dev = np.abs(gram - eye)
            slack = dev - 4.0 * stderr
            worst = int(np.argmax(slack))
            passed = bool(slack.flat[worst] <= 1e-12)
            body = {
                "mode": "monte-carlo",
                "samples": args.samples,
                "seed": args.seed,
                "max_deviation": float(dev.max()),
                "worst_entry": [worst // size, worst % size],
                "worst_excess_over_4se": float(slack.flat[worst]),
            }
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "command": "simulate",
        "thetas": list(params.thetas),
        "n": params.n,
        "passed": passed,
        "timing": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "seconds": time.perf_counter() - started,
        },
        **body,
    }
    _emit(payload, args.out)
    _say("simulate: pass" if passed else "simulate: FAIL")
    return 0 if passed else 1


def cmd_apply(args) -> int:
    expr_data = _load_json(args.expr)
    phi_data = _load_json(args.functional)
    try:
        expr = parse_expr(expr_data)
        phi = Functional.from_json(phi_data)
        result = expr.apply(phi)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    _emit({"command": "apply", **result.to_json()}, args.out)
    return 0


def cmd_norms(args) -> int:
    try:
        phi = Functional.from_json(_load_json(args.functional))
        table = [
            {"p": p, "norm": phi.norm(p), "dual_norm": phi.dual_norm(p)}
            for p in args.p
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "command": "norms",
        "truncation": phi.truncation,
        "entries": len(phi.support()),
        "norms": table,
    }
    _emit(payload, args.out)
    return 0


def cmd_qms(args) -> int:
    try:
        weight = Weight2D.from_json(_load_json(args.weight))
        x, n_x = matrix_from_json(_load_json(args.x))
        n = args.n if args.n is not None else n_x
        if n != n_x:
            raise ConfigError(f"--n {n} conflicts with observable size for n = {n_x}")
        ham = None
        if args.hamiltonian:
            ham, n_h = matrix_from_json(_load_json(args.hamiltonian))
            if n_h != n:
                raise ConfigError(
                    f"hamiltonian is sized for n = {n_h}, observable for n = {n}"
                )
        spec = GeneratorSpec(weight, n, ham)
        result = generator_apply(spec, x)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit({"command": "qms", "result": matrix_to_json(result, n)}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoscalc",
        description="Verification and simulation tools for the truncated chaotic calculus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run identity-check families")
    verify.add_argument("--n", type=int, default=8, help="truncation level (default 8)")
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    verify.add_argument(
        "--only",
        action="append",
        metavar="FAMILY",
        help=f"restrict to families (repeatable, comma-separated); known: {', '.join(FAMILY_NAMES)}",
    )
    verify.add_argument("--weight", help="weight JSON file overriding the random fixtures")
    verify.add_argument("--out", help="write the JSON report here instead of stdout")
    verify.set_defaults(func=cmd_verify)

    simulate = sub.add_parser("simulate", help="Bernoulli noise Gram and moment checks")
    simulate.add_argument("--theta", default="0.5", help='float literal or JSON file (default "0.5")')
    simulate.add_argument("--n", type=int, default=8)
    simulate.add_argument("--samples", type=int, help="Monte Carlo sample count")
    simulate.add_argument("--exact", action="store_true", help="exact enumeration (default)")
    simulate.add_argument("--seed", type=int, default=42)
    simulate.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    simulate.add_argument("--out")
    simulate.set_defaults(func=cmd_simulate)

    apply_cmd = sub.add_parser("apply", help="apply an operator expression to a functional")
    apply_cmd.add_argument("--expr", required=True, help="operator expression JSON file")
    apply_cmd.add_argument("--functional", required=True, help="functional JSON file")
    apply_cmd.add_argument("--out")
    apply_cmd.set_defaults(func=cmd_apply)

    norms = sub.add_parser("norms", help="graded and dual norms of a functional")
    norms.add_argument("--functional", required=True)
    norms.add_argument("--p", type=float, nargs="+", default=[0.0, 1.0, 2.0])
    norms.add_argument("--out")
    norms.set_defaults(func=cmd_norms)

    qms = sub.add_parser("qms", help="apply the Lindblad-type generator to an observable")
    qms.add_argument("--weight", required=True)
    qms.add_argument("--x", required=True, help="observable matrix JSON file")
    qms.add_argument("--hamiltonian", help="optional Hamiltonian JSON (default: occupancy count)")
    qms.add_argument("--n", type=int, help="truncation (default: inferred from --x)")
    qms.add_argument("--out")
    qms.set_defaults(func=cmd_qms)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
