"""Damped Newton iteration on vector fields, with finite-difference Jacobians."""

from __future__ import annotations

import numpy as np

__all__ = ["fd_jacobian", "damped_newton"]


def fd_jacobian(f, x: np.ndarray, rel_step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    jac = np.empty((n, n))
    for k in range(n):
        h = rel_step * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        jac[:, k] = (f(xp) - f(xm)) / (2.0 * h)
    return jac


def damped_newton(
    f,
    x0: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 60,
) -> tuple[np.ndarray, bool]:
    """Solve f(x) = 0 near x0; returns (x, converged).

    Steps are halved until the residual max-norm decreases, which keeps the
    iteration from overshooting out of the basin when seeded from a crude
    integration endpoint.  Singular Jacobians terminate the iteration with
    the best iterate so far.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = f(x)
    rnorm = float(np.max(np.abs(r)))
    for _ in range(max_iter):
        if rnorm < tol:
            return x, True
        try:
            step = np.linalg.solve(fd_jacobian(f, x), -r)
        except np.linalg.LinAlgError:
            return x, False
        if not np.all(np.isfinite(step)):
            return x, False
        lam = 1.0
        for _ in range(30):
            x_new = x + lam * step
            r_new = f(x_new)
            rnorm_new = float(np.max(np.abs(r_new)))
            if np.isfinite(rnorm_new) and rnorm_new < rnorm:
                break
            lam *= 0.5
        else:
            return x, rnorm < tol
        x, r, rnorm = x_new, r_new, rnorm_new
    return x, rnorm < tol
