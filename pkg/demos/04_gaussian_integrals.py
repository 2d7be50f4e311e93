"""Closed-form Gaussian integrals against seeded Monte Carlo.

E[exp(u'Mu/2 + b'u)] under N(0, Q) has an exact expression whenever the
conjugated operator Q^(1/2) M Q^(1/2) stays below the identity. The
complex-linear extension supplies characteristic functions. Both are
checked here against the sampling route.
"""

import numpy as np

from lapcert import (ConditionViolatedError, GaussianMeasure, MonteCarloEngine,
                     gauss_integral_complex, gauss_integral_real)

rng = np.random.default_rng(1)
q = np.array([[1.0, 0.3], [0.3, 0.8]])
prior = GaussianMeasure(np.zeros(2), q)
m = np.array([[-0.6, 0.1], [0.1, 0.2]])
b1 = np.array([0.4, -0.2])
b2 = np.array([0.8, 0.5])

closed = gauss_integral_real(prior, m, b1)
engine = MonteCarloEngine(samples=2_000_000, seed=7)
est, se = engine.expectation_with_error(
    lambda u: np.exp(0.5 * np.einsum("ij,jk,ik->i", u, m, u) + u @ b1), prior)
print(f"real integral: closed form {closed:.6f}")
print(f"               monte carlo {est:.6f} +- {se:.6f} "
      f"({abs(closed - est) / se:.2f} standard errors)")

closed_c = gauss_integral_complex(prior, m, b1, b2)
cos_est, cos_se = engine.expectation_with_error(
    lambda u: np.exp(0.5 * np.einsum("ij,jk,ik->i", u, m, u) + u @ b1)
    * np.cos(u @ b2), prior)
sin_est, sin_se = engine.expectation_with_error(
    lambda u: np.exp(0.5 * np.einsum("ij,jk,ik->i", u, m, u) + u @ b1)
    * np.sin(u @ b2), prior)
print(f"complex integral: closed form {closed_c:.6f}")
print(f"                  monte carlo {cos_est:.6f} + {sin_est:.6f}j")

print()
print("The precondition is enforced, with the offending eigenvalue reported:")
try:
    gauss_integral_real(prior, np.eye(2) * 2.0, b1)
except ConditionViolatedError as err:
    print(f"  rejected: {err}")
