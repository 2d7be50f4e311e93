"""Gaussian approximation of Bayesian inverse-problem posteriors.

The library builds the mode-centered Gaussian (Laplace) approximation of
a posterior with Gaussian prior, verifies its density characterization
numerically, estimates the Hellinger distance between posterior and
approximation, and computes certified bounds on that distance.
"""

from .engines import GaussHermiteEngine, MonteCarloEngine, default_engine
from .errors import (ConditionViolatedError, DivergentIntegralError,
                     IndefiniteHessianError, LapcertError, MaxIterationsError,
                     NotPositiveDefiniteError, ProblemSpecError, UnknownModelError)
from .gaussian import (GaussianMeasure, SymmetricOperator, conjugated_spectrum,
                       det_factor, det_factor_shifted, gauss_integral_complex,
                       gauss_integral_real)
from .laplace import (MapResult, TaylorMisfit, charfn_check, find_map,
                      laplace_measure, normalization_constant, taylor_misfit)
from .metrics import (BoundCertificate, certify_direct, certify_envelope,
                      expectation_gap_bound, hellinger, hellinger_bound_from_k,
                      hellinger_vs_gaussian, reverse_cs_d, reverse_cs_k)
from .problems import (ForwardModel, ForwardProblem, builtin_model,
                       builtin_model_names, check_derivatives, load_problem,
                       problem_from_dict)

__version__ = "0.1.0"

__all__ = [
    "BoundCertificate",
    "ConditionViolatedError",
    "DivergentIntegralError",
    "ForwardModel",
    "ForwardProblem",
    "GaussHermiteEngine",
    "GaussianMeasure",
    "IndefiniteHessianError",
    "LapcertError",
    "MapResult",
    "MaxIterationsError",
    "MonteCarloEngine",
    "NotPositiveDefiniteError",
    "ProblemSpecError",
    "SymmetricOperator",
    "TaylorMisfit",
    "UnknownModelError",
    "builtin_model",
    "builtin_model_names",
    "certify_direct",
    "certify_envelope",
    "charfn_check",
    "check_derivatives",
    "conjugated_spectrum",
    "default_engine",
    "det_factor",
    "det_factor_shifted",
    "expectation_gap_bound",
    "find_map",
    "gauss_integral_complex",
    "gauss_integral_real",
    "hellinger",
    "hellinger_bound_from_k",
    "hellinger_vs_gaussian",
    "laplace_measure",
    "load_problem",
    "normalization_constant",
    "problem_from_dict",
    "reverse_cs_d",
    "reverse_cs_k",
    "taylor_misfit",
]
