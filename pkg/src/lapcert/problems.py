"""Inverse-problem definitions: forward maps, misfit, objective, derivatives.

An observation y = G(u) + noise with noise ~ N(0, Gamma) and a centered
Gaussian prior N(0, C0) induces

    misfit(u)    = |Gamma^{-1/2} (y - G(u))|^2 / 2
    objective(u) = misfit(u) + |C0^{-1/2} u|^2 / 2

whose minimizer is the posterior mode. The weighted norms are the
noise-whitened and prior-whitened (Cameron-Martin) norms respectively.

ForwardModel.eval must accept batches of shape (..., dim_in) and return
(..., dim_out); Jacobian and Hessian are evaluated pointwise. Evaluation
must be reentrant: the integration engines may call it concurrently.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.linalg as sla

from . import fd
from .errors import NotPositiveDefiniteError, ProblemSpecError, UnknownModelError
from .gaussian import GaussianMeasure, _as_square_matrix, _check_symmetry

__all__ = [
    "ForwardModel",
    "ForwardProblem",
    "builtin_model",
    "builtin_model_names",
    "load_problem",
    "problem_from_dict",
    "check_derivatives",
    "DERIVATIVE_CHECK_THRESHOLDS",
]


class ForwardModel:
    """Forward map G with first and second derivatives.

    Parameters
    ----------
    dim_in, dim_out : int
    eval : callable
        Batched map, (..., dim_in) -> (..., dim_out).
    jacobian : callable or None
        Pointwise Jacobian, (dim_in,) -> (dim_out, dim_in). Falls back to
        central differences of eval when None.
    hessian : callable or None
        Pointwise second derivative, (dim_in,) -> (dim_out, dim_in, dim_in).
        Falls back to central differences of the Jacobian when None.
    name : str
    """

    def __init__(self, dim_in, dim_out, eval, jacobian=None, hessian=None,
                 name="custom"):
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)
        self._eval = eval
        self._jacobian = jacobian
        self._hessian = hessian
        self.name = name

    def __call__(self, u):
        return self.eval(u)

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim_in:
            raise ValueError(f"expected trailing dimension {self.dim_in}, got {u.shape}")
        out = np.asarray(self._eval(u), dtype=float)
        expected = u.shape[:-1] + (self.dim_out,)
        return np.broadcast_to(out, expected) if out.shape != expected else out

    def jacobian(self, u):
        u = np.asarray(u, dtype=float)
        if self._jacobian is None:
            jac = fd.fd_jacobian(self.eval, u)
        else:
            jac = np.asarray(self._jacobian(u), dtype=float)
        if jac.shape != (self.dim_out, self.dim_in):
            raise ValueError(f"jacobian has shape {jac.shape}, "
                             f"expected {(self.dim_out, self.dim_in)}")
        return jac

    def hessian(self, u):
        u = np.asarray(u, dtype=float)
        if self._hessian is None:
            hess = fd.fd_hessian_of_map(self.jacobian, u)
        else:
            hess = np.asarray(self._hessian(u), dtype=float)
        if hess.shape != (self.dim_out, self.dim_in, self.dim_in):
            raise ValueError(f"hessian has shape {hess.shape}, expected "
                             f"{(self.dim_out, self.dim_in, self.dim_in)}")
        return hess

    def __repr__(self):
        return f"ForwardModel({self.name}, {self.dim_in}->{self.dim_out})"


class ForwardProblem:
    """Forward model, noise covariance, centered Gaussian prior, and data."""

    def __init__(self, model: ForwardModel, noise_cov, prior: GaussianMeasure, data):
        self.model = model
        gamma = _check_symmetry(_as_square_matrix(noise_cov, "noise covariance"),
                                "noise covariance")
        if gamma.shape[0] != model.dim_out:
            raise ValueError("noise covariance does not match the model output dim")
        try:
            self._gamma_chol = sla.cholesky(gamma, lower=True)
        except sla.LinAlgError:
            smallest = float(np.linalg.eigvalsh(gamma).min())
            raise NotPositiveDefiniteError(smallest, what="noise covariance") from None
        if prior.dim != model.dim_in:
            raise ValueError("prior does not match the model input dim")
        if np.any(prior.mean != 0.0):
            raise ValueError("the prior must be centered (mean zero)")
        y = np.atleast_1d(np.asarray(data, dtype=float))
        if y.shape != (model.dim_out,):
            raise ValueError(f"data has shape {y.shape}, expected ({model.dim_out},)")
        self.noise_cov = gamma
        self.noise_cov.setflags(write=False)
        self.prior = prior
        self.data = y
        self.data.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.model.dim_in

    def with_data(self, data) -> "ForwardProblem":
        return ForwardProblem(self.model, self.noise_cov, self.prior, data)

    # -- whitening helpers ------------------------------------------------

    def _whiten_noise(self, r):
        return sla.solve_triangular(self._gamma_chol, np.atleast_2d(r).T, lower=True).T

    def _whiten_prior(self, u):
        return sla.solve_triangular(self.prior.chol, np.atleast_2d(u).T, lower=True).T

    def _noise_precision_apply(self, r):
        return sla.cho_solve((self._gamma_chol, True), r)

    def _prior_precision_apply(self, u):
        return sla.cho_solve((self.prior.chol, True), u)

    # -- values ------------------------------------------------------------

    def residual(self, u):
        return self.data - self.model.eval(u)

    def misfit(self, u):
        """Half the noise-whitened squared residual; batched like eval."""
        u = np.asarray(u, dtype=float)
        z = self._whiten_noise(self.residual(u))
        val = 0.5 * np.sum(z * z, axis=-1)
        return float(val[0]) if u.ndim == 1 else val

    def objective(self, u):
        """misfit(u) plus the prior-whitened quadratic penalty."""
        u = np.asarray(u, dtype=float)
        z = self._whiten_prior(u)
        pen = 0.5 * np.sum(z * z, axis=-1)
        pen = float(pen[0]) if u.ndim == 1 else pen
        return self.misfit(u) + pen

    # -- derivatives (pointwise) --------------------------------------------

    def grad_misfit(self, u):
        u = np.asarray(u, dtype=float)
        r = self.residual(u)
        return -self.model.jacobian(u).T @ self._noise_precision_apply(r)

    def grad_objective(self, u):
        u = np.asarray(u, dtype=float)
        return self.grad_misfit(u) + self._prior_precision_apply(u)

    def hess_misfit(self, u):
        """Gauss-Newton term plus the curvature of G weighted by the residual."""
        u = np.asarray(u, dtype=float)
        jac = self.model.jacobian(u)
        w = self._noise_precision_apply(self.residual(u))
        h = jac.T @ self._noise_precision_apply(jac) - np.tensordot(w, self.model.hessian(u), axes=1)
        return 0.5 * (h + h.T)

    def hess_objective(self, u):
        prior_prec = self._prior_precision_apply(np.eye(self.dim))
        h = self.hess_misfit(u) + prior_prec
        return 0.5 * (h + h.T)

    def __repr__(self):
        return (f"ForwardProblem({self.model.name}, n={self.model.dim_in}, "
                f"m={self.model.dim_out})")


# -- built-in models ---------------------------------------------------------

QUAD2D_LINEAR = np.array([1.0, 0.7])
QUAD2D_QUADRATIC = np.array([0.35, -0.25])
QUAD2D_DATA = np.array([0.8, -0.6])


def _exp1d(y=2.0, **_):
    model = ForwardModel(
        1, 1,
        eval=lambda u: np.exp(u),
        jacobian=lambda u: np.exp(u).reshape(1, 1),
        hessian=lambda u: np.exp(u).reshape(1, 1, 1),
        name="exp1d",
    )
    prior = GaussianMeasure(np.zeros(1), np.eye(1))
    return ForwardProblem(model, np.eye(1), prior, [float(np.atleast_1d(y)[0])])


def _linear(y=None, dim_in=2, dim_out=2, seed=0, **_):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim_out, dim_in))
    model = ForwardModel(
        dim_in, dim_out,
        eval=lambda u, a=a: u @ a.T,
        jacobian=lambda u, a=a: a,
        hessian=lambda u, s=(dim_out, dim_in, dim_in): np.zeros(s),
        name="linear",
    )
    prior = GaussianMeasure(np.zeros(dim_in), np.eye(dim_in))
    if y is None:
        y = a @ rng.normal(size=dim_in) + 0.3 * rng.normal(size=dim_out)
    return ForwardProblem(model, np.eye(dim_out), prior, y)


def _quad2d(y=None, **_):
    a, b = QUAD2D_LINEAR, QUAD2D_QUADRATIC

    def hess(u):
        out = np.zeros((2, 2, 2))
        out[0, 0, 0] = 2.0 * b[0]
        out[1, 1, 1] = 2.0 * b[1]
        return out

    model = ForwardModel(
        2, 2,
        eval=lambda u: a * u + b * u * u,
        jacobian=lambda u: np.diag(a + 2.0 * b * u),
        hessian=hess,
        name="quad2d",
    )
    prior = GaussianMeasure(np.zeros(2), np.eye(2))
    return ForwardProblem(model, np.eye(2), prior, QUAD2D_DATA if y is None else y)


_REGISTRY = {"exp1d": _exp1d, "linear": _linear, "quad2d": _quad2d}


def builtin_model_names():
    return sorted(_REGISTRY)


def builtin_model(name, **overrides) -> ForwardProblem:
    """Instantiate a registered problem; keyword overrides include `y`."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownModelError(
            f"unknown model {name!r}; available: {', '.join(builtin_model_names())}"
        ) from None
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return factory(**overrides)


# -- problem files ------------------------------------------------------------

def _as_matrix_field(value, what):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ProblemSpecError(f"{what} must be a square matrix (row-major rows)")
    return arr


def _expression_model(expressions, dim_in) -> ForwardModel:
    import sympy

    if isinstance(expressions, str):
        expressions = [expressions]
    symbols = sympy.symbols(f"u1:{dim_in + 1}")
    try:
        parsed = [sympy.sympify(e) for e in expressions]
    except (sympy.SympifyError, SyntaxError) as exc:
        raise ProblemSpecError(f"could not parse model expression: {exc}") from None
    for expr in parsed:
        extra = expr.free_symbols - set(symbols)
        if extra:
            raise ProblemSpecError(
                f"expression {expr} uses unknown symbols {sorted(map(str, extra))}; "
                f"allowed: u1..u{dim_in}"
            )
    dim_out = len(parsed)
    funcs = [sympy.lambdify(symbols, e, "numpy") for e in parsed]
    jac_exprs = [[sympy.diff(e, s) for s in symbols] for e in parsed]
    jac_funcs = [[sympy.lambdify(symbols, d, "numpy") for d in row] for row in jac_exprs]
    hess_funcs = [[[sympy.lambdify(symbols, sympy.diff(d, s), "numpy") for s in symbols]
                   for d in row] for row in jac_exprs]

    def eval_(u):
        cols = [u[..., i] for i in range(dim_in)]
        return np.stack([np.broadcast_to(f(*cols), u.shape[:-1]) for f in funcs],
                        axis=-1)

    def jacobian(u):
        args = tuple(u)
        return np.array([[float(f(*args)) for f in row] for row in jac_funcs])

    def hessian(u):
        args = tuple(u)
        return np.array([[[float(f(*args)) for f in row] for row in mat]
                         for mat in hess_funcs])

    name = "expr:" + ",".join(str(e) for e in parsed)
    return ForwardModel(dim_in, dim_out, eval_, jacobian, hessian, name=name)


def problem_from_dict(spec: dict) -> ForwardProblem:
    """Build a ForwardProblem from a parsed problem description.

    Expected keys: model (built-in name, or expression(s) in u1..un),
    y (vector), gamma (matrix), prior_cov (matrix). Scalars are accepted
    for 1x1 matrices and scalar data.
    """
    if not isinstance(spec, dict):
        raise ProblemSpecError("problem description must be a JSON object")
    missing = [k for k in ("model", "y") if k not in spec]
    if missing:
        raise ProblemSpecError(f"missing required field(s): {', '.join(missing)}")
    y = np.atleast_1d(np.asarray(spec["y"], dtype=float))
    gamma = _as_matrix_field(spec.get("gamma", np.eye(y.size)), "gamma")
    model_field = spec["model"]

    if isinstance(model_field, str) and model_field in _REGISTRY:
        problem = builtin_model(model_field, y=y)
        prior_cov = spec.get("prior_cov")
        if prior_cov is None and np.array_equal(gamma, problem.noise_cov):
            return problem
        prior = (problem.prior if prior_cov is None
                 else GaussianMeasure(np.zeros(problem.dim),
                                      _as_matrix_field(prior_cov, "prior_cov")))
        try:
            return ForwardProblem(problem.model, gamma, prior, y)
        except (ValueError, NotPositiveDefiniteError) as exc:
            raise ProblemSpecError(str(exc)) from None

    if "prior_cov" not in spec:
        raise ProblemSpecError("expression models require prior_cov")
    prior_cov = _as_matrix_field(spec["prior_cov"], "prior_cov")
    try:
        prior = GaussianMeasure(np.zeros(prior_cov.shape[0]), prior_cov)
        model = _expression_model(model_field, prior.dim)
        return ForwardProblem(model, gamma, prior, y)
    except ProblemSpecError:
        raise
    except (ValueError, NotPositiveDefiniteError) as exc:
        raise ProblemSpecError(str(exc)) from None


def load_problem(path) -> ForwardProblem:
    """Load a JSON problem description; parse errors carry line and column."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSpecError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return problem_from_dict(spec)


# -- derivative checking -------------------------------------------------------

DERIVATIVE_CHECK_THRESHOLDS = {
    "jacobian": 1e-5,
    "forward_hessian": 1e-4,
    "grad_objective": 1e-5,
    "hess_objective": 1e-4,
}


def _rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.abs(b).max(initial=0.0)), 1.0)
    return float(np.abs(a - b).max(initial=0.0)) / scale


def check_derivatives(problem: ForwardProblem, n_points=20, seed=0, radius=1.0):
    """Compare supplied derivatives against central differences.

    Returns a dict of {quantity: (max relative error, threshold, passed)}
    over `n_points` prior-scaled random points. Models whose Jacobian or
    Hessian already falls back to finite differences are still exercised,
    but those rows then compare the fallback against itself at a different
    step and are only a smoke test.
    """
    rng = np.random.default_rng(seed)
    points = radius * rng.standard_normal((n_points, problem.dim)) @ problem.prior.chol.T
    worst = dict.fromkeys(DERIVATIVE_CHECK_THRESHOLDS, 0.0)
    model = problem.model
    for u in points:
        worst["jacobian"] = max(
            worst["jacobian"],
            _rel_err(model.jacobian(u), fd.fd_jacobian(model.eval, u)))
        worst["forward_hessian"] = max(
            worst["forward_hessian"],
            _rel_err(model.hessian(u), fd.fd_hessian_of_map(model.jacobian, u)))
        worst["grad_objective"] = max(
            worst["grad_objective"],
            _rel_err(problem.grad_objective(u), fd.fd_gradient(problem.objective, u)))
        worst["hess_objective"] = max(
            worst["hess_objective"],
            _rel_err(problem.hess_objective(u),
                     fd.fd_hessian_of_gradient(problem.grad_objective, u)))
    return {
        key: (err, DERIVATIVE_CHECK_THRESHOLDS[key], err <= DERIVATIVE_CHECK_THRESHOLDS[key])
        for key, err in worst.items()
    }
