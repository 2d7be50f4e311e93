"""Central finite differences for derivative fallbacks and checks."""

from __future__ import annotations

import numpy as np

_EPS = float(np.finfo(float).eps)
# truncation/round-off balance for central differences
STEP_FIRST = _EPS ** (1.0 / 3.0)
STEP_SECOND = _EPS ** (1.0 / 4.0)


def _steps(u: np.ndarray, base: float) -> np.ndarray:
    return (1.0 + np.abs(u)) * base


def fd_jacobian(f, u, base=STEP_FIRST) -> np.ndarray:
    """Central-difference Jacobian of a vector-valued f at u, shape (m, n)."""
    u = np.asarray(u, dtype=float)
    h = _steps(u, base)
    cols = []
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = h[i]
        cols.append((np.asarray(f(u + e)) - np.asarray(f(u - e))) / (2.0 * h[i]))
    jac = np.column_stack([np.atleast_1d(c) for c in cols])
    if not np.all(np.isfinite(jac)):
        raise FloatingPointError("finite-difference Jacobian produced non-finite values")
    return jac


def fd_gradient(f, u, base=STEP_FIRST) -> np.ndarray:
    """Central-difference gradient of a scalar f at u."""
    u = np.asarray(u, dtype=float)
    h = _steps(u, base)
    g = np.empty_like(u)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = h[i]
        g[i] = (float(f(u + e)) - float(f(u - e))) / (2.0 * h[i])
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("finite-difference gradient produced non-finite values")
    return g


def fd_hessian_of_map(jac, u, base=STEP_SECOND) -> np.ndarray:
    """Differentiate a Jacobian-valued map, giving shape (m, n, n), symmetrized."""
    u = np.asarray(u, dtype=float)
    h = _steps(u, base)
    n = u.size
    slabs = []
    for i in range(n):
        e = np.zeros_like(u)
        e[i] = h[i]
        slabs.append((np.asarray(jac(u + e)) - np.asarray(jac(u - e))) / (2.0 * h[i]))
    # slabs[i][k, j] = d^2 G_k / du_j du_i
    hess = np.stack(slabs, axis=-1)
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    if not np.all(np.isfinite(hess)):
        raise FloatingPointError("finite-difference Hessian produced non-finite values")
    return hess


def fd_hessian_of_gradient(grad, u, base=STEP_SECOND) -> np.ndarray:
    """Differentiate a gradient-valued map, giving a symmetric (n, n) matrix."""
    u = np.asarray(u, dtype=float)
    h = _steps(u, base)
    n = u.size
    cols = []
    for i in range(n):
        e = np.zeros_like(u)
        e[i] = h[i]
        cols.append((np.asarray(grad(u + e)) - np.asarray(grad(u - e))) / (2.0 * h[i]))
    hess = np.column_stack(cols)
    return 0.5 * (hess + hess.T)
