"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Criterion 1 checks the bundled reference table for the built-in
one-dimensional exponential case study; see its docstring for the
recorded reproduction finding.
"""

import time

import numpy as np
import pytest

from lapcert import (GaussHermiteEngine, GaussianMeasure, MonteCarloEngine,
                     builtin_model, certify_direct, certify_envelope, charfn_check,
                     check_derivatives, expectation_gap_bound, find_map,
                     gauss_integral_complex, gauss_integral_real, hellinger,
                     laplace_measure, normalization_constant, problem_from_dict,
                     reverse_cs_d, reverse_cs_k, taylor_misfit)
from oracles import random_gauss_integral_instance, random_spd

GH96 = GaussHermiteEngine(96)
GH48 = GaussHermiteEngine(48)

# Reference table for the exponential case study (columns: d_H, direct K,
# direct bound, envelope K, envelope bound).
CASE_STUDY_TARGETS = {
    -2.0: (0.32595, 0.46621, 0.41128, 0.55328, 0.50517),
    2.0: (0.095810, 0.13648, 0.10330, 0.17422, 0.13434),
}


def report(number, label, ok, detail=""):
    state = "PASS" if ok else "FAIL"
    suffix = f"  {detail}" if detail else ""
    print(f"\nACCEPTANCE {number} {label}: {state}{suffix}")


def case_study_row(y, sigma, gamma, engine=GH96):
    """(d_H, K_direct, bound_direct, K_envelope, bound_envelope) for the
    exponential model with prior N(0, sigma^2) and noise N(0, gamma^2)."""
    problem = problem_from_dict({
        "model": "exp(u1)", "y": [y],
        "gamma": [[gamma ** 2]], "prior_cov": [[sigma ** 2]],
    })
    result = find_map(problem)
    surrogate = taylor_misfit(problem, result)
    direct = certify_direct(problem, surrogate, result, engine)
    envelope = certify_envelope(problem, surrogate, result, engine)
    return (hellinger(problem, surrogate, engine),
            direct.k_value, direct.hellinger_bound,
            envelope.k_value, envelope.hellinger_bound)


def worst_relative_deviation(sigma, gamma):
    worst = 0.0
    for y, targets in CASE_STUDY_TARGETS.items():
        got = case_study_row(y, sigma, gamma)
        worst = max(worst,
                    max(abs(g - t) / abs(t) for g, t in zip(got, targets)))
    return worst


def test_criterion_1_case_study_reproduction():
    """Reproduce the reference table at unit prior/noise variance (2%
    relative on all ten numbers, under one second), falling back to the
    documented variance sweep over {0.5, 1, 2}^2 at 0.5% relative.

    Recorded finding (both gates fail; the reference table itself is not
    reproducible from the stated model):

    * At sigma = gamma = 1 the implementation, confirmed by two
      independent oracle routes (adaptive quadrature on Lebesgue densities
      and the quadratic-surrogate route; they agree to 9 digits), yields
      y=-2: (0.10390, 0.14663, 0.11153, 0.18517, 0.14355) and
      y=+2: (0.25123, 0.36725, 0.31034, 0.45863, 0.40332), far outside 2%.
    * No point of the 3x3 sweep grid comes close (best worst-case
      deviation is about 78%).
    * A free fit over (sigma, gamma) bottoms out near 1.5% worst-case at
      the implausible point sigma ~ 5.9, gamma ~ 0.28, so the 0.5% gate is
      unreachable anywhere, let alone on the grid.
    * The y=+2 reference row alone is reproduced essentially exactly
      (0.02% worst deviation, the level of the published rounding) by
      sigma = 1, gamma^2 = 0.075; the y=-2 row admits no exact
      configuration with data -2 at all (best 0.17% at sigma ~ 5.70,
      gamma ~ 1.03, whose prior scale contradicts the +2 row). The two
      reference rows are therefore mutually inconsistent under this model
      family, and the failure below is expected and left red on purpose.
    """
    start = time.perf_counter()
    rows = {y: case_study_row(y, 1.0, 1.0) for y in CASE_STUDY_TARGETS}
    runtime = time.perf_counter() - start

    deviations = {
        y: [abs(g - t) / abs(t) for g, t in zip(rows[y], CASE_STUDY_TARGETS[y])]
        for y in rows
    }
    base_worst = max(max(d) for d in deviations.values())
    base_ok = base_worst <= 0.02 and runtime < 1.0

    if base_ok:
        report(1, "case-study-reproduction", True,
               f"worst dev {base_worst:.2%}, runtime {runtime:.2f}s")
        return

    # documented fallback: variance sweep over {0.5, 1, 2}^2 at 0.5%
    sweep = {(s, g): worst_relative_deviation(s, g)
             for s in (0.5, 1.0, 2.0) for g in (0.5, 1.0, 2.0)}
    (best_s, best_g), best_dev = min(sweep.items(), key=lambda kv: kv[1])
    sweep_ok = best_dev <= 0.005

    print("\nrecorded finding for criterion 1:")
    print(f"  runtime {runtime:.3f}s (budget 1s)")
    for y, row in rows.items():
        print(f"  y={y:+g} computed " + " ".join(f"{v:.6f}" for v in row))
        print(f"        reference " + " ".join(f"{v:.6f}"
                                               for v in CASE_STUDY_TARGETS[y])
              + f"   worst dev {max(deviations[y]):.1%}")
    print("  sweep over (sigma, gamma) in {0.5, 1, 2}^2, worst deviation per point:")
    for (s, g), dev in sorted(sweep.items()):
        print(f"    sigma={s:<4} gamma={g:<4} -> {dev:.1%}")
    print(f"  best grid point: sigma={best_s}, gamma={best_g} at {best_dev:.1%} "
          "(gate: 0.5%)")

    report(1, "case-study-reproduction", sweep_ok,
           f"base worst dev {base_worst:.1%}, best sweep dev {best_dev:.1%}")
    assert runtime < 1.0
    assert sweep_ok, (
        "reference table not reproduced: "
        f"unit-variance worst deviation {base_worst:.1%} (gate 2%); "
        f"best sweep point sigma={best_s}, gamma={best_g} deviates {best_dev:.1%} "
        "(gate 0.5%). See the recorded finding above and the test docstring: "
        "the reference rows are mutually inconsistent under this model family."
    )


def test_criterion_2_linear_exactness():
    """Random linear-Gaussian problems: the approximation is exact, so the
    distance and both certificate constants vanish to 1e-6."""
    from lapcert import ForwardModel, ForwardProblem

    rng = np.random.default_rng(20260811)
    worst_d, worst_k = 0.0, 0.0
    for _ in range(20):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 6))
        a = rng.normal(size=(m, n))
        gamma = random_spd(rng, m, jitter=0.5)
        prior_cov = random_spd(rng, n, jitter=0.5)
        u_true = rng.normal(size=n)
        y = a @ u_true + 0.3 * rng.normal(size=m)
        model = ForwardModel(
            n, m,
            eval=lambda u, a=a: u @ a.T,
            jacobian=lambda u, a=a: a,
            hessian=lambda u, s=(m, n, n): np.zeros(s),
            name="linear")
        problem = ForwardProblem(model, gamma, GaussianMeasure(np.zeros(n), prior_cov), y)
        engine = (GaussHermiteEngine(24) if n <= 3
                  else MonteCarloEngine(samples=40_000, seed=int(rng.integers(1 << 31))))
        result = find_map(problem)
        surrogate = taylor_misfit(problem, result)
        worst_d = max(worst_d, hellinger(problem, surrogate, engine))
        worst_k = max(worst_k,
                      certify_direct(problem, surrogate, result, engine).k_value,
                      certify_envelope(problem, surrogate, result, engine).k_value)
    ok = worst_d <= 1e-6 and worst_k <= 1e-6
    report(2, "linear-exactness", ok,
           f"max d_H {worst_d:.2e}, max K {worst_k:.2e}")
    assert ok


def test_criterion_3_density_characterization():
    """Characteristic-function identity to 1e-6 and normalization constant
    to 1e-8 on the exponential model (both data values) and quad2d."""
    cases = []
    for y in (-2.0, 2.0):
        cases.append((builtin_model("exp1d", y=y), GH96,
                      [[0.5], [1.0], [2.0]]))
    cases.append((builtin_model("quad2d"), GH48,
                  [[0.5, 0.0], [1.0, 0.5], [2.0, 1.0], [0.3, -0.7]]))

    worst_cf, worst_norm = 0.0, 0.0
    for problem, engine, grid in cases:
        result = find_map(problem)
        surrogate = taylor_misfit(problem, result)
        analytic, numeric = normalization_constant(problem, surrogate, result, engine)
        worst_norm = max(worst_norm, abs(numeric - analytic) / abs(analytic))
        for lam in grid:
            lhs, rhs = charfn_check(problem, surrogate, result, lam, engine)
            worst_cf = max(worst_cf, abs(lhs - rhs) / abs(rhs))
    ok = worst_cf <= 1e-6 and worst_norm <= 1e-8
    report(3, "density-characterization", ok,
           f"max charfn dev {worst_cf:.2e}, max normalization dev {worst_norm:.2e}")
    assert ok


def test_criterion_4_gaussian_integral_oracle():
    """Closed-form Gaussian integrals vs their seeded Monte Carlo estimates
    within three standard errors, 50 random instances up to dimension 4."""
    rng = np.random.default_rng(4)
    failures = []
    worst_z = 0.0
    for trial in range(50):
        n = int(rng.integers(1, 5))
        cov, m, b1 = random_gauss_integral_instance(rng, n)
        b2 = 0.7 * rng.normal(size=n)
        prior = GaussianMeasure(np.zeros(n), cov)
        engine = MonteCarloEngine(samples=1_000_000, seed=trial)

        closed_real = gauss_integral_real(prior, m, b1)
        closed_cplx = gauss_integral_complex(prior, m, b1, b2)

        def base(u):
            return np.exp(0.5 * np.einsum("ij,jk,ik->i", u, m, u) + u @ b1)

        comparisons = [
            ("real", closed_real, base),
            ("cos", closed_cplx.real, lambda u: base(u) * np.cos(u @ b2)),
            ("sin", closed_cplx.imag, lambda u: base(u) * np.sin(u @ b2)),
        ]
        for tag, value, integrand in comparisons:
            est, se = engine.expectation_with_error(integrand, prior)
            z = abs(value - est) / se if se > 0 else 0.0
            worst_z = max(worst_z, z)
            if z > 3.0:
                failures.append((trial, tag, z))
    ok = not failures
    report(4, "gaussian-integral-oracle", ok,
           f"150 comparisons, worst |z| {worst_z:.2f}" +
           (f", failures {failures}" if failures else ""))
    assert ok, failures


def test_criterion_5_reverse_cs_lemmas():
    """Both reverse Cauchy-Schwarz conclusions hold on 1e4 random pairs each."""
    rng = np.random.default_rng(5)
    violations = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 8))
        f = rng.normal(size=n) * rng.uniform(0.1, 3.0)
        g = rng.normal(size=n) * rng.uniform(0.1, 3.0)
        holds, lower = reverse_cs_d(f, g, float(rng.uniform(0.05, 2.0)))
        if holds and f @ g < lower - 1e-12:
            violations += 1
    for _ in range(10_000):
        n = int(rng.integers(1, 8))
        f = rng.normal(size=n) * rng.uniform(0.1, 3.0)
        # rejection onto the hypothesis set: perturb f by less than k|f|
        k = float(rng.uniform(0.05, 0.95))
        direction = rng.normal(size=n)
        direction /= np.linalg.norm(direction)
        g = f + direction * k * rng.uniform(0.0, 1.0) * np.linalg.norm(f)
        holds, lower = reverse_cs_k(f, g, k)
        assert holds
        if f @ g < lower - 1e-12:
            violations += 1
    ok = violations == 0
    report(5, "reverse-cauchy-schwarz", ok, f"violations {violations}")
    assert ok


def _builtin_instances():
    for name, y in (("exp1d", -2.0), ("exp1d", 2.0), ("linear", None),
                    ("quad2d", None)):
        problem = builtin_model(name, y=y)
        engine = GH96 if problem.dim == 1 else GH48
        result = find_map(problem)
        yield name, y, problem, result, taylor_misfit(problem, result), engine


def test_criterion_6_bound_dominance():
    """Wherever a certificate is valid the measured distance obeys it."""
    checked = 0
    margin = np.inf
    for name, y, problem, result, surrogate, engine in _builtin_instances():
        d = hellinger(problem, surrogate, engine)
        for certify in (certify_direct, certify_envelope):
            cert = certify(problem, surrogate, result, engine)
            if cert.valid:
                checked += 1
                margin = min(margin, cert.hellinger_bound - d)
                assert d <= cert.hellinger_bound + 1e-6, (name, y, cert)
    ok = checked >= 6
    report(6, "bound-dominance", ok,
           f"{checked} valid certificates, smallest margin {margin:.2e}")
    assert ok


def test_criterion_7_expectation_gap_bound():
    """Moment-gap inequality for three test functions on both data values."""
    functions = {
        "u": lambda u: u[:, 0],
        "u^2": lambda u: u[:, 0] ** 2,
        "exp(u) clipped": lambda u: np.exp(u[:, 0]) * (np.abs(u[:, 0]) < 5.0),
    }
    worst_slack = np.inf
    for y in (-2.0, 2.0):
        problem = builtin_model("exp1d", y=y)
        result = find_map(problem)
        approx = laplace_measure(result)
        for label, f in functions.items():
            gap, bound = expectation_gap_bound(problem, approx, f, GH96)
            worst_slack = min(worst_slack, bound - gap)
            assert gap <= bound + 1e-6, (y, label, gap, bound)
    report(7, "expectation-gap-bound", True,
           f"smallest bound-gap slack {worst_slack:.4f}")


def test_criterion_8_derivative_hygiene():
    """Finite-difference audit of every built-in model at 20 random points."""
    worst = {}
    for name in ("exp1d", "linear", "quad2d"):
        outcome = check_derivatives(builtin_model(name), n_points=20, seed=0)
        for key, (err, threshold, passed) in outcome.items():
            worst[key] = max(worst.get(key, 0.0), err)
            assert passed, (name, key, err, threshold)
    report(8, "derivative-hygiene", True,
           " ".join(f"{k}={v:.1e}" for k, v in sorted(worst.items())))


def test_criterion_9_remainder_identity():
    """objective - expansion-at-mode equals misfit - surrogate, pointwise."""
    rng = np.random.default_rng(9)
    worst = 0.0
    for name in ("exp1d", "linear", "quad2d"):
        problem = builtin_model(name)
        result = find_map(problem)
        surrogate = taylor_misfit(problem, result)
        hi = result.hess_i_at_map.matrix
        for u in rng.normal(size=(100, problem.dim)):
            d = u - result.u_map
            lhs = problem.objective(u) - result.i_at_map - 0.5 * d @ hi @ d
            rhs = problem.misfit(u) - surrogate(u)
            dev = abs(lhs - rhs) / max(1.0, abs(rhs))
            worst = max(worst, dev)
            assert dev <= 1e-9, (name, u, lhs, rhs)
    report(9, "remainder-identity", True, f"worst rel dev {worst:.2e}")
