"""Command-line front end.

Subcommands: solve | laplace | certify | reproduce-paper | check-derivatives.
Reports are JSON (schema 1), deterministic for a fixed seed and engine
order: no timestamps, sorted keys. Exit codes: 0 success, 1 problem
description errors, 2 solver failures, 3 divergent integrals.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .engines import GaussHermiteEngine, MonteCarloEngine
from .errors import (DivergentIntegralError, IndefiniteHessianError, LapcertError,
                     MaxIterationsError, ProblemSpecError, UnknownModelError)
from .laplace import find_map, laplace_measure, taylor_misfit
from .metrics import certify_direct, certify_envelope, hellinger
from .problems import builtin_model, builtin_model_names, check_derivatives, load_problem

SCHEMA = 1
EXIT_OK = 0
EXIT_SPEC = 1
EXIT_SOLVER = 2
EXIT_DIVERGENT = 3

DENSITY_GRID = np.round(np.arange(-400, 401) * 0.01, 2)


def _parse_vector(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lapcert",
        description="Gaussian approximation of Bayesian inverse-problem "
                    "posteriors with certified Hellinger-distance bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_problem=True):
        if need_problem:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--builtin", choices=builtin_model_names(),
                             help="built-in model name")
            src.add_argument("--spec", metavar="PATH",
                             help="JSON problem description file")
            p.add_argument("--y", type=_parse_vector, metavar="CSV",
                           help="override observation, comma separated")
        p.add_argument("--engine", choices=("gh", "mc"), default="gh")
        p.add_argument("--order", type=int, default=None,
                       help="Gauss-Hermite order (default 96 in 1D, 48 per axis)")
        p.add_argument("--samples", type=int, default=1_000_000,
                       help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="PATH", default=None,
                       help="write the report here instead of stdout "
                            "(a directory for reproduce-paper)")

    add_common(sub.add_parser("solve", help="find the posterior mode"))
    add_common(sub.add_parser("laplace", help="mode plus Gaussian approximation"))
    add_common(sub.add_parser("certify",
                              help="distance estimate and certified bounds"))
    repro = sub.add_parser("reproduce-paper",
                           help="rerun the bundled 1D exponential case study "
                                "and emit its table and density curves")
    add_common(repro, need_problem=False)
    check = sub.add_parser("check-derivatives",
                           help="finite-difference audit of model derivatives")
    add_common(check)
    check.add_argument("--points", type=int, default=20)
    return parser


def _load(args):
    problem = (builtin_model(args.builtin, y=args.y) if args.builtin
               else load_problem(args.spec))
    if args.y is not None and args.builtin is None:
        problem = problem.with_data(args.y)
    return problem


def _engine_for(args, dim):
    if args.engine == "mc":
        return MonteCarloEngine(samples=args.samples, seed=args.seed)
    order = args.order if args.order is not None else (96 if dim == 1 else 48)
    return GaussHermiteEngine(order=order)


def _emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _solve_payload(problem, result):
    return {
        "schema": SCHEMA,
        "problem": {"model": problem.model.name, "dim": problem.dim,
                    "y": problem.data.tolist()},
        "u_map": result.u_map.tolist(),
        "i_at_map": result.i_at_map,
        "grad_norm": result.grad_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "multistart_spread": result.multistart_spread,
    }


def cmd_solve(args):
    problem = _load(args)
    result = find_map(problem, seed=args.seed)
    _emit(_solve_payload(problem, result), args.out)
    return EXIT_OK


def cmd_laplace(args):
    problem = _load(args)
    result = find_map(problem, seed=args.seed)
    measure = laplace_measure(result)
    payload = _solve_payload(problem, result)
    payload["laplace"] = {"mean": measure.mean.tolist(),
                          "covariance": measure.cov.tolist()}
    _emit(payload, args.out)
    return EXIT_OK


def _certificate_payload(cert):
    return {"K": cert.k_value, "bound": cert.hellinger_bound, "valid": cert.valid,
            "lhs": cert.lhs, "rhs": cert.rhs}


def _certify(problem, engine, seed):
    result = find_map(problem, seed=seed)
    surrogate = taylor_misfit(problem, result)
    dist = hellinger(problem, surrogate, engine)
    direct = certify_direct(problem, surrogate, result, engine)
    envelope = certify_envelope(problem, surrogate, result, engine)

    def tightness(cert):
        return cert.hellinger_bound / dist if (cert.valid and dist > 0) else None

    payload = _solve_payload(problem, result)
    payload.update({
        "engine": engine.description(),
        "d_hellinger": dist,
        "direct": _certificate_payload(direct),
        "envelope": _certificate_payload(envelope),
        "tightness": {"direct": tightness(direct), "envelope": tightness(envelope)},
    })
    return payload


def cmd_certify(args):
    problem = _load(args)
    engine = _engine_for(args, problem.dim)
    _emit(_certify(problem, engine, args.seed), args.out)
    return EXIT_OK


def _density_rows(problem, engine):
    prior = problem.prior
    grid = DENSITY_GRID[:, None]
    norm_post = float(engine.expectation(
        lambda u: np.exp(-problem.misfit(u)), prior))
    posterior = np.exp(-problem.misfit(grid)) * prior.density(grid) / norm_post
    approx = laplace_measure(find_map(problem))
    return zip(DENSITY_GRID, posterior, approx.density(grid))


def cmd_reproduce_paper(args):
    import os

    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    header = ("y", "d_H", "K_direct", "bound_direct", "K_envelope", "bound_envelope")
    print(("{:>6} " + "{:>14} " * 5).format(*header).rstrip())
    for y in (-2.0, 2.0):
        problem = builtin_model("exp1d", y=y)
        engine = _engine_for(args, problem.dim)
        payload = _certify(problem, engine, args.seed)
        row = (payload["d_hellinger"],
               payload["direct"]["K"], payload["direct"]["bound"],
               payload["envelope"]["K"], payload["envelope"]["bound"])
        print(("{:>6} " + "{:>14.6f} " * 5).format(f"{y:+g}", *row).rstrip())
        name = os.path.join(out_dir, f"densities_y{y:+g}.csv")
        with open(name, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["u", "posterior_density", "laplace_density"])
            for u, post, lap in _density_rows(problem, engine):
                writer.writerow([f"{u:.2f}", repr(float(post)), repr(float(lap))])
        print(f"wrote {name}")
    return EXIT_OK


def cmd_check_derivatives(args):
    problem = _load(args)
    report = check_derivatives(problem, n_points=args.points, seed=args.seed)
    ok = True
    for key, (err, threshold, passed) in sorted(report.items()):
        ok &= passed
        print(f"{key:>16}: max rel err {err:.3e} (threshold {threshold:.0e}) "
              f"{'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_SOLVER


_COMMANDS = {
    "solve": cmd_solve,
    "laplace": cmd_laplace,
    "certify": cmd_certify,
    "reproduce-paper": cmd_reproduce_paper,
    "check-derivatives": cmd_check_derivatives,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ProblemSpecError, UnknownModelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (MaxIterationsError, IndefiniteHessianError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DivergentIntegralError as exc:
        print(f"divergent integral: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except LapcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
