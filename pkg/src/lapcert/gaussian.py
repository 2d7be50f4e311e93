"""Gaussian measures on R^n and closed-form Gaussian integrals.

The measures here are dense, desk-scale objects (n up to a few hundred):
a mean vector and an SPD covariance with a cached Cholesky factor. The
module also provides the closed-form value of

    E[exp(u' M u / 2 + b' u)]  for  u ~ N(0, Q),

its complex-linear-term extension, and determinant factors of the form
det(C^{1/2} H C^{1/2}) used by the approximation certificates.

All objects are immutable after construction (arrays are marked
read-only), so concurrent reads are safe. Sampling takes an explicit
seed per call; there is no shared generator state.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import ConditionViolatedError, NotPositiveDefiniteError

__all__ = [
    "GaussianMeasure",
    "SymmetricOperator",
    "as_symmetric_matrix",
    "gauss_integral_real",
    "gauss_integral_complex",
    "det_factor",
    "det_factor_shifted",
    "conjugated_spectrum",
]

# Relative tolerance for accepting a matrix as symmetric.
SYMMETRY_RTOL = 1e-12

LOG_2PI = float(np.log(2.0 * np.pi))


def _as_square_matrix(a, what="matrix") -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    return m


def _check_symmetry(m: np.ndarray, what="matrix") -> np.ndarray:
    scale = max(float(np.abs(m).max(initial=0.0)), 1.0)
    defect = float(np.abs(m - m.T).max(initial=0.0))
    if defect > SYMMETRY_RTOL * scale:
        raise ValueError(
            f"{what} is not symmetric: max asymmetry {defect:.3g} "
            f"exceeds {SYMMETRY_RTOL:.0e} relative"
        )
    # exact symmetry downstream keeps eigh/cholesky well behaved
    return 0.5 * (m + m.T)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _spd_sqrt(cov: np.ndarray, what="covariance") -> np.ndarray:
    """Symmetric square root via eigendecomposition."""
    w, v = np.linalg.eigh(cov)
    if w.min() <= 0.0:
        raise NotPositiveDefiniteError(w.min(), what=what)
    return (v * np.sqrt(w)) @ v.T


class SymmetricOperator:
    """A dense symmetric matrix, validated on construction."""

    def __init__(self, matrix):
        m = _as_square_matrix(matrix, "symmetric operator")
        self._matrix = _readonly(_check_symmetry(m, "symmetric operator"))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self):
        return f"SymmetricOperator(dim={self.dim})"


def as_symmetric_matrix(m, what="symmetric operator") -> np.ndarray:
    """Accept a SymmetricOperator or array-like; return the validated ndarray."""
    if isinstance(m, SymmetricOperator):
        return m.matrix
    return _check_symmetry(_as_square_matrix(m, what), what)


class GaussianMeasure:
    """N(mean, cov) on R^n with cached Cholesky and symmetric square root.

    Parameters
    ----------
    mean : array-like, shape (n,)
    cov : array-like, shape (n, n)
        Must be symmetric (to 1e-12 relative) and positive definite.

    Raises
    ------
    ValueError
        On shape mismatch or asymmetry.
    NotPositiveDefiniteError
        If the Cholesky factorization fails.
    """

    def __init__(self, mean, cov):
        m = np.atleast_1d(np.array(mean, dtype=float))
        if m.ndim != 1:
            raise ValueError(f"mean must be a vector, got shape {m.shape}")
        c = _check_symmetry(_as_square_matrix(cov, "covariance"), "covariance")
        if c.shape[0] != m.shape[0]:
            raise ValueError(
                f"mean has dim {m.shape[0]} but covariance is {c.shape[0]}x{c.shape[0]}"
            )
        try:
            chol = sla.cholesky(c, lower=True)
        except sla.LinAlgError:
            smallest = float(np.linalg.eigvalsh(c).min())
            raise NotPositiveDefiniteError(smallest, what="covariance") from None
        self._mean = _readonly(m)
        self._cov = _readonly(c)
        self._chol = _readonly(chol)
        self._sqrt = None  # computed lazily; construction stays cheap

    @property
    def dim(self) -> int:
        return self._mean.shape[0]

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def cov(self) -> np.ndarray:
        return self._cov

    @property
    def chol(self) -> np.ndarray:
        """Lower-triangular L with L L' = cov."""
        return self._chol

    @property
    def sqrt_cov(self) -> np.ndarray:
        """The symmetric square root cov^{1/2} (eigendecomposition based)."""
        if self._sqrt is None:
            self._sqrt = _readonly(_spd_sqrt(self._cov))
        return self._sqrt

    def _dev(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise ValueError(
                f"point has dimension {u.shape[-1]}, measure has dimension {self.dim}"
            )
        return u - self._mean

    def log_density(self, u):
        """Log Lebesgue density at u; u may be a single point or a batch.

        Computed through the Cholesky factor:
        -|L^{-1}(u - m)|^2 / 2 - log det(2 pi cov) / 2.
        """
        dev = self._dev(u)
        z = sla.solve_triangular(self._chol, np.atleast_2d(dev).T, lower=True).T
        quad = np.sum(z * z, axis=-1)
        logdet = 2.0 * float(np.sum(np.log(np.diag(self._chol))))
        out = -0.5 * quad - 0.5 * (logdet + self.dim * LOG_2PI)
        return float(out[0]) if dev.ndim == 1 else out

    def density(self, u):
        return np.exp(self.log_density(u))

    def sample(self, seed, count):
        """Draw `count` samples with a fresh PCG64 generator seeded by `seed`.

        Returns shape (count, n). Identical seeds give bit-identical output.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((int(count), self.dim))
        return self._mean + z @ self._chol.T

    def __repr__(self):
        return f"GaussianMeasure(dim={self.dim})"


def _conjugated_eig(q_sqrt: np.ndarray, m: np.ndarray):
    """Eigendecomposition of Q^{1/2} M Q^{1/2} (symmetric conjugation)."""
    a = q_sqrt @ m @ q_sqrt
    a = 0.5 * (a + a.T)
    return np.linalg.eigh(a)


def _gauss_integral(prior: GaussianMeasure, m, b1, b2) -> complex:
    """Shared closed form; b2 enters as the imaginary part of the linear term."""
    if np.any(prior.mean != 0.0):
        raise ValueError("closed-form Gaussian integrals require a centered prior")
    mm = as_symmetric_matrix(m)
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    if mm.shape[0] != prior.dim or b1.shape != (prior.dim,) or b2.shape != (prior.dim,):
        raise ValueError("operator/vector dimensions do not match the prior")
    s = prior.sqrt_cov
    lam, vec = _conjugated_eig(s, mm)
    top = float(lam.max())
    if top >= 1.0 - 1e-10:
        raise ConditionViolatedError(top, limit=1.0)
    inv = 1.0 / (1.0 - lam)
    x1 = vec.T @ (s @ b1)
    x2 = vec.T @ (s @ b2)
    # quadratic forms with L = Q^{1/2} (1 - Q^{1/2} M Q^{1/2})^{-1} Q^{1/2}
    q11 = float(np.sum(x1 * x1 * inv))
    q12 = float(np.sum(x1 * x2 * inv))
    q22 = float(np.sum(x2 * x2 * inv))
    denom = float(np.sqrt(np.prod(1.0 - lam)))
    return np.exp(0.5 * q11 - 0.5 * q22 + 1j * q12) / denom


def gauss_integral_real(prior: GaussianMeasure, m, b) -> float:
    """E[exp(u' M u / 2 + b' u)] for u ~ prior = N(0, Q), in closed form.

    Requires the spectrum of Q^{1/2} M Q^{1/2} to stay strictly below 1;
    otherwise the integral diverges and ConditionViolatedError is raised
    with the offending eigenvalue.

    The value is
        exp(|(1 - Q^{1/2} M Q^{1/2})^{-1/2} Q^{1/2} b|^2 / 2)
            / sqrt(det(1 - Q^{1/2} M Q^{1/2})).
    """
    b = np.asarray(b, dtype=float)
    return float(_gauss_integral(prior, m, b, np.zeros_like(b)).real)


def gauss_integral_complex(prior: GaussianMeasure, m, b1, b2) -> complex:
    """E[exp(u' M u / 2 + (b1 + i b2)' u)] for u ~ prior = N(0, Q).

    With L = Q^{1/2} (1 - Q^{1/2} M Q^{1/2})^{-1} Q^{1/2} the value is

        exp(<L b1, b1>/2 + i <L b1, b2> - <L b2, b2>/2)
            / sqrt(det(1 - Q^{1/2} M Q^{1/2})),

    the analytic continuation of the real case in the linear term. Setting
    b2 = 0 reproduces gauss_integral_real through the identical code path.
    """
    return _gauss_integral(prior, m, b1, b2)


def conjugated_spectrum(prior_cov, h) -> np.ndarray:
    """Ascending eigenvalues of C^{1/2} H C^{1/2} for SPD C and symmetric H."""
    c = _check_symmetry(_as_square_matrix(prior_cov, "prior covariance"),
                        "prior covariance")
    hh = as_symmetric_matrix(h)
    if hh.shape != c.shape:
        raise ValueError("operator and covariance dimensions differ")
    s = _spd_sqrt(c, what="prior covariance")
    lam, _ = _conjugated_eig(s, hh)
    return lam


def det_factor(prior_cov, h) -> float:
    """det(C^{1/2} H C^{1/2}) via the symmetric eigendecomposition.

    Raises NotPositiveDefiniteError (reporting the smallest eigenvalue)
    unless the conjugated operator is positive definite.
    """
    lam = conjugated_spectrum(prior_cov, h)
    if lam.min() <= 0.0:
        raise NotPositiveDefiniteError(lam.min(), what="conjugated operator")
    return float(np.prod(lam))


def det_factor_shifted(prior_cov, h) -> float:
    """det(Id + C^{1/2} H C^{1/2}), the shifted form of det_factor.

    For H equal to the misfit Hessian and det_factor applied to the full
    objective Hessian (misfit plus prior precision) the two agree exactly.
    """
    lam = conjugated_spectrum(prior_cov, h)
    if (1.0 + lam).min() <= 0.0:
        raise NotPositiveDefiniteError((1.0 + lam).min(),
                                       what="shifted conjugated operator")
    return float(np.prod(1.0 + lam))
