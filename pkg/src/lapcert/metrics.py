"""Hellinger distance and computable error certificates for the approximation.

Everything is expressed through prior expectations. Writing p for the
misfit and q for its quadratic surrogate at the mode, the posterior and
the Gaussian approximation have prior densities proportional to exp(-p)
and exp(-q), so

    d_H^2 = 1 - E[exp(-(p+q)/2)] / sqrt(E[exp(-p)] E[exp(-q)]).

Two certificates bound d_H without knowing it. Both measure a constant K
and, when K < 1, yield the bound K / sqrt(1 + (1-K)^2):

  * direct: K is the L2(prior) norm of exp(-p/2) - exp(-q/2) divided by
    the analytic norm of exp(-q/2). This is the sharper certificate.
  * envelope: the squared difference of exponentials is majorized
    pointwise by exp(-min(p, q)) * min(|p-q|^2/4, 1); K^2 integrates the
    majorant against the prior, normalized the same way. Looser, but the
    integrand avoids cancellation.

The certificates are measured, not assumed: the reported K is the ratio
actually attained by the integrals, so a valid certificate is a concrete
numerical statement about the given problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegralError, LapcertError
from .gaussian import (GaussianMeasure, conjugated_spectrum, det_factor,
                       det_factor_shifted)
from .laplace import MapResult, TaylorMisfit
from .problems import ForwardProblem

__all__ = [
    "BoundCertificate",
    "hellinger",
    "hellinger_vs_gaussian",
    "certify_direct",
    "certify_envelope",
    "hellinger_bound_from_k",
    "reverse_cs_d",
    "reverse_cs_k",
    "expectation_gap_bound",
]

# quadrature noise floor when the two densities coincide
_RADICAND_CLAMP = -1e-12


def hellinger_bound_from_k(k: float) -> float:
    """The certificate map K -> K / sqrt(1 + (1-K)^2); increasing on (0, 1)."""
    return float(k / np.sqrt(1.0 + (1.0 - k) ** 2))


@dataclass(frozen=True)
class BoundCertificate:
    """Measured certificate constant and the resulting distance bound.

    `lhs <= K * rhs` holds by construction with K = lhs / rhs; the bound
    only carries meaning when `valid` (K strictly inside (0, 1)).
    """

    k_value: float
    method: str            # "direct" | "envelope"
    hellinger_bound: float
    lhs: float
    rhs: float
    valid: bool


def _check_integrable(problem: ForwardProblem, taylor: TaylorMisfit):
    """exp(-q) is prior-integrable iff Id + C^{1/2} (hess q) C^{1/2} > 0."""
    lam = conjugated_spectrum(problem.prior.cov, taylor.hess)
    if 1.0 + lam.min() <= 1e-10:
        raise DivergentIntegralError(
            "exp of the negative quadratic surrogate is not integrable against "
            f"the prior: conjugated curvature eigenvalue {lam.min():.6g} <= -1"
        )


def _sqrt_radicand(value: float) -> float:
    if value < _RADICAND_CLAMP:
        raise LapcertError(f"radicand {value:.3g} is negative beyond quadrature noise")
    return float(np.sqrt(min(max(value, 0.0), 1.0)))


def hellinger(problem: ForwardProblem, taylor: TaylorMisfit, engine) -> float:
    """Hellinger distance between the posterior and the surrogate measure.

    All three prior integrals are evaluated with the same engine. Tiny
    negative radicands from quadrature noise are clamped to zero.
    """
    _check_integrable(problem, taylor)
    inner = float(engine.expectation(
        lambda u: np.exp(-0.5 * (problem.misfit(u) + taylor(u))), problem.prior))
    norm_post = float(engine.expectation(
        lambda u: np.exp(-problem.misfit(u)), problem.prior))
    norm_surr = float(engine.expectation(
        lambda u: np.exp(-taylor(u)), problem.prior))
    return _sqrt_radicand(1.0 - inner / np.sqrt(norm_post * norm_surr))


def hellinger_vs_gaussian(problem: ForwardProblem, approx: GaussianMeasure,
                          engine) -> float:
    """Hellinger distance between the posterior and an arbitrary Gaussian.

    Uses Lebesgue-density ratios rather than the quadratic surrogate, so it
    is an independent route to the same number when `approx` is the
    mode-centered approximation.
    """
    prior = problem.prior
    norm_post = float(engine.expectation(
        lambda u: np.exp(-problem.misfit(u)), prior))

    def integrand(u):
        log_ratio = approx.log_density(u) - prior.log_density(u)
        return np.exp(0.5 * (-problem.misfit(u) - np.log(norm_post) + log_ratio))

    return _sqrt_radicand(1.0 - float(engine.expectation(integrand, prior)))


def _rhs_unit(problem: ForwardProblem, result: MapResult) -> float:
    """Analytic L2(prior) norm of exp(-q/2): the square root of the
    normalization constant exp(-I*) / sqrt(det(C^{1/2} H C^{1/2}))."""
    det_full = det_factor(problem.prior.cov, result.hess_i_at_map)
    det_shift = det_factor_shifted(problem.prior.cov, result.hess_phi_at_map)
    if abs(det_full - det_shift) > 1e-10 * max(abs(det_full), abs(det_shift)):
        raise LapcertError(
            "determinant factors disagree: "
            f"det(C^1/2 H C^1/2)={det_full!r} vs det(Id + C^1/2 Hmisfit C^1/2)={det_shift!r}"
        )
    return float(np.exp(-0.5 * result.i_at_map) / det_full ** 0.25)


def _certificate(k: float, method: str, lhs: float, rhs: float) -> BoundCertificate:
    return BoundCertificate(
        k_value=float(k),
        method=method,
        hellinger_bound=hellinger_bound_from_k(k),
        lhs=float(lhs),
        rhs=float(rhs),
        valid=bool(0.0 < k < 1.0),
    )


def certify_direct(problem: ForwardProblem, taylor: TaylorMisfit,
                   result: MapResult, engine) -> BoundCertificate:
    """Certificate from the L2(prior) norm of the density-root difference."""
    _check_integrable(problem, taylor)
    lhs_sq = float(engine.expectation(
        lambda u: (np.exp(-0.5 * problem.misfit(u)) - np.exp(-0.5 * taylor(u))) ** 2,
        problem.prior))
    lhs = float(np.sqrt(max(lhs_sq, 0.0)))
    rhs = _rhs_unit(problem, result)
    return _certificate(lhs / rhs, "direct", lhs, rhs)


def certify_envelope(problem: ForwardProblem, taylor: TaylorMisfit,
                     result: MapResult, engine) -> BoundCertificate:
    """Certificate from the pointwise majorant of the density-root difference.

    Uses |e^{-a} - e^{-b}| <= e^{-min(a,b)} min(|a-b|, 1), so the integrand
    never subtracts nearly-equal exponentials.
    """
    _check_integrable(problem, taylor)

    def integrand(u):
        p = problem.misfit(u)
        q = taylor(u)
        return np.exp(-np.minimum(p, q)) * np.minimum((p - q) ** 2 / 4.0, 1.0)

    integral = float(engine.expectation(integrand, problem.prior))
    lhs = float(np.sqrt(max(integral, 0.0)))
    rhs = _rhs_unit(problem, result)
    return _certificate(lhs / rhs, "envelope", lhs, rhs)


def reverse_cs_d(f, g, d: float):
    """Reverse Cauchy-Schwarz, sum-normalized hypothesis.

    If |f-g|^2 <= d (|f|^2 + |g|^2) then <f, g> >= (1-d)/2 (|f|^2 + |g|^2).
    Returns (hypothesis holds, the lower bound) for coefficient vectors.
    """
    if d <= 0:
        raise ValueError("d must be positive")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    nf2 = float(f @ f)
    ng2 = float(g @ g)
    diff2 = float((f - g) @ (f - g))
    holds = diff2 <= d * (nf2 + ng2)
    return holds, 0.5 * (1.0 - d) * (nf2 + ng2)


def reverse_cs_k(f, g, k: float):
    """Reverse Cauchy-Schwarz, relative hypothesis.

    If |f-g| <= k |f| with k in (0, 1) then
    <f, g> >= (1-k) / (1 + (1-k)^2) (|f|^2 + |g|^2).
    """
    if not 0.0 < k < 1.0:
        raise ValueError("k must lie strictly inside (0, 1)")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    nf2 = float(f @ f)
    ng2 = float(g @ g)
    diff = float(np.linalg.norm(f - g))
    holds = diff <= k * float(np.sqrt(nf2))
    lower = (1.0 - k) / (1.0 + (1.0 - k) ** 2) * (nf2 + ng2)
    return holds, lower


def _squared_norm(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return values * values if values.ndim == 1 else np.sum(values * values, axis=-1)


def expectation_gap_bound(problem: ForwardProblem, approx: GaussianMeasure, f,
                          engine):
    """Observed expectation gap between posterior and approximation, and its
    Hellinger-based bound.

    For f with finite second moments under both measures,
    |E_post f - E_approx f| <= 2 sqrt(E_post |f|^2 + E_approx |f|^2) d_H.
    Returns (gap, bound), both computed numerically with the same engine;
    f may be scalar- or vector-valued (batched).
    """
    prior = problem.prior
    norm_post = float(engine.expectation(
        lambda u: np.exp(-problem.misfit(u)), prior))

    def weighted(fun):
        def integrand(u):
            vals = np.asarray(fun(u), dtype=float)
            w = np.exp(-problem.misfit(u))
            return vals * w if vals.ndim == 1 else vals * w[:, None]
        return engine.expectation(integrand, prior)

    post_mean = weighted(f) / norm_post
    post_sq = float(weighted(lambda u: _squared_norm(f(u)))) / norm_post
    approx_mean = engine.expectation(f, approx)
    approx_sq = float(engine.expectation(lambda u: _squared_norm(f(u)), approx))

    gap = float(np.linalg.norm(np.atleast_1d(post_mean - approx_mean)))
    dist = hellinger_vs_gaussian(problem, approx, engine)
    bound = 2.0 * float(np.sqrt(post_sq + approx_sq)) * dist
    return gap, bound
