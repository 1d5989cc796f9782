"""Terminal-cost optimal control of the two-segment swarm.

Minimises the leecher-side mass x_l(T) + x_a(T) + x_b(T) over
piecewise-constant open-loop controls on [0, T] (single shooting).  The
inner objective uses a fixed-step batched RK4 so finite differences are
smooth in the control parameters; the reported solution is re-integrated
with the adaptive engine so its objective is directly comparable with
closed-loop baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .control import BangBang, ControlPolicy
from .engine import IntegratorConfig, Trajectory, integrate
from .model import SwarmParams, SwarmState, two_segment_field

__all__ = [
    "OCProblem",
    "OCSolution",
    "OptimizerConfig",
    "evaluate_objective",
    "solve_mayer",
]


@dataclass(frozen=True)
class OCProblem:
    """Mayer problem: fixed horizon, piecewise-constant control grid."""

    params: SwarmParams
    x0: SwarmState
    horizon: float
    n_intervals: int

    def __post_init__(self) -> None:
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon}")
        if self.n_intervals < 1:
            raise ValueError(f"n_intervals must be >= 1, got {self.n_intervals}")


@dataclass(frozen=True)
class OCSolution:
    """Optimised control grid with its realised trajectory.

    ``objective`` equals the trajectory's terminal x_l + x_a + x_b exactly.
    """

    u_grid: np.ndarray
    trajectory: Trajectory
    objective: float
    converged: bool


@dataclass(frozen=True)
class OptimizerConfig:
    """Projected-gradient settings: iteration limit, step rule, FD probe."""

    max_iter: int = 80
    fd_step: float = 1e-6
    obj_tol: float = 1e-11
    steps_per_interval: int = 6
    first_step: float = 0.25


def _objective_cfg(T: float) -> IntegratorConfig:
    return IntegratorConfig(method="rk45", rel_tol=1e-10, abs_tol=1e-12, t_end=T)


def evaluate_objective(p: SwarmParams, x0, control, T: float) -> float:
    """Terminal leecher-side mass under a policy, constant u, or u grid."""
    if T < 0 or not math.isfinite(T):
        raise ValueError(f"horizon must be nonnegative and finite, got {T}")
    x = x0.as_array() if isinstance(x0, SwarmState) else np.asarray(x0, dtype=float)
    if T == 0:
        return float(x[0] + x[1] + x[2])
    field = two_segment_field(p)
    if isinstance(control, ControlPolicy) or np.isscalar(control):
        traj = integrate(field, x, control, _objective_cfg(T))
        xf = traj.final_state
        return float(xf[0] + xf[1] + xf[2])
    xf = _integrate_u_grid(p, x, np.asarray(control, dtype=float), T).final_state
    return float(xf[0] + xf[1] + xf[2])


def _integrate_u_grid(p: SwarmParams, x0: np.ndarray, u_grid: np.ndarray, T: float) -> Trajectory:
    """Adaptive integration across the piecewise-constant intervals."""
    field = two_segment_field(p)
    n = len(u_grid)
    h = T / n
    times = [0.0]
    states = [x0.copy()]
    controls = [float(u_grid[0])]
    x = x0
    for k, u in enumerate(u_grid):
        traj = integrate(field, x, float(u), _objective_cfg(h))
        offset = k * h
        times.extend(float(t) + offset for t in traj.times[1:])
        states.extend(traj.states[1:])
        controls.extend(float(u) for _ in traj.times[1:])
        x = traj.final_state
    return Trajectory(
        times=np.array(times), states=np.array(states), controls=np.array(controls)
    )


def _terminal_states_batch(
    p: SwarmParams, x0: np.ndarray, U: np.ndarray, T: float, steps_per_interval: int
) -> np.ndarray:
    """Fixed-step RK4 terminal states for a batch of control grids.

    U has shape (m, n): m independent control grids over n intervals.
    Vectorising the batch keeps finite-difference gradients cheap.
    """
    m, n = U.shape
    h = T / (n * steps_per_interval)
    X = np.tile(x0, (m, 1))
    b, g, ll, ls, d = p.beta, p.gamma, p.lambda_l, p.lambda_s, p.delta

    def rhs(Y: np.ndarray, u: np.ndarray) -> np.ndarray:
        x_l, x_a, x_b, x_s = Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3]
        return np.stack(
            [
                ll - b * x_l * (x_a + x_b + x_s),
                -x_a * (b * x_s + g * x_b) + b * x_l * (x_a + u * x_s),
                -x_b * (b * x_s + g * x_a) + b * x_l * (x_b + (1.0 - u) * x_s),
                ls + b * (x_a + x_b) * x_s + 2.0 * g * x_a * x_b - d * x_s,
            ],
            axis=1,
        )

    for k in range(n):
        u = U[:, k]
        for _ in range(steps_per_interval):
            k1 = rhs(X, u)
            k2 = rhs(X + 0.5 * h * k1, u)
            k3 = rhs(X + 0.5 * h * k2, u)
            k4 = rhs(X + h * k3, u)
            X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return X


def _surrogate_objective(p, x0, U, T, spi) -> np.ndarray:
    Xf = _terminal_states_batch(p, x0, U, T, spi)
    return Xf[:, 0] + Xf[:, 1] + Xf[:, 2]


def _gradient(p, x0, u: np.ndarray, T: float, spi: int, eps: float) -> np.ndarray:
    n = len(u)
    U = np.repeat(u[None, :], 2 * n, axis=0)
    for k in range(n):
        U[2 * k, k] += eps
        U[2 * k + 1, k] -= eps
    f = _surrogate_objective(p, x0, U, T, spi)
    return (f[0::2] - f[1::2]) / (2.0 * eps)


def _project(u: np.ndarray) -> np.ndarray:
    return np.clip(u, 0.0, 1.0)


def _projected_gradient(p, x0, u0: np.ndarray, T: float, opt: OptimizerConfig):
    """Projected gradient with Barzilai-Borwein steps and Armijo backtracking."""
    spi = opt.steps_per_interval
    u = _project(u0.copy())
    f = float(_surrogate_objective(p, x0, u[None, :], T, spi)[0])
    g = _gradient(p, x0, u, T, spi, opt.fd_step)
    alpha = opt.first_step / max(float(np.max(np.abs(g))), 1e-12)
    converged = False
    plateau = 0
    for _ in range(opt.max_iter):
        if float(np.max(np.abs(_project(u - g) - u))) < 1e-12:
            converged = True
            break
        improved = False
        step = alpha
        for _ in range(40):
            u_new = _project(u - step * g)
            if np.array_equal(u_new, u):
                break
            f_new = float(_surrogate_objective(p, x0, u_new[None, :], T, spi)[0])
            decrease = float(np.dot(g, u - u_new))
            if f_new <= f - 1e-4 * max(decrease, 0.0):
                improved = True
                break
            step *= 0.5
        if not improved:
            converged = True  # no descent along the projected gradient path
            break
        g_new = _gradient(p, x0, u_new, T, spi, opt.fd_step)
        s = u_new - u
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-16:
            alpha = float(np.dot(s, s)) / sy  # BB1 step
            alpha = min(max(alpha, 1e-6), 1e4)
        else:
            alpha = step * 2.0
        plateau = plateau + 1 if abs(f - f_new) <= opt.obj_tol * (1.0 + abs(f)) else 0
        u, f, g = u_new, f_new, g_new
        if plateau >= 2:
            converged = True
            break
    return u, f, converged


def _bang_bang_start(prob: OCProblem) -> np.ndarray:
    """Closed-loop bang-bang control sampled onto the interval grid."""
    field = two_segment_field(prob.params)
    policy = BangBang()
    n = prob.n_intervals
    cfg = IntegratorConfig(
        method="rk4", step=prob.horizon / (n * 16), t_end=prob.horizon
    )
    traj = integrate(field, prob.x0.as_array(), policy, cfg)
    starts = np.arange(n) * (prob.horizon / n)
    u = np.empty(n)
    for k, t in enumerate(starts):
        idx = int(np.searchsorted(traj.times, t, side="right")) - 1
        x = traj.states[max(idx, 0)]
        u[k] = policy.value(x[1], x[2])
    return u


def solve_mayer(prob: OCProblem, opt: OptimizerConfig | None = None) -> OCSolution:
    """Locally optimal piecewise-constant control for the Mayer problem.

    Deterministic multi-start projected gradient: all-0, all-1, all-1/2 and
    the sampled closed-loop bang-bang rule.  The returned objective is
    never above the best initialisation (raw starts are kept as
    candidates), and is computed from the adaptively re-integrated
    trajectory so it equals the trajectory's terminal sum exactly.
    """
    if opt is None:
        opt = OptimizerConfig()
    n = prob.n_intervals
    x0 = prob.x0.as_array()
    starts = [
        np.zeros(n),
        np.ones(n),
        np.full(n, 0.5),
        _bang_bang_start(prob),
    ]

    candidates: list[tuple[np.ndarray, bool]] = [(u, True) for u in starts]
    for u_start in starts:
        u_opt, _, converged = _projected_gradient(
            prob.params, x0, u_start, prob.horizon, opt
        )
        candidates.append((u_opt, converged))

    best_u = None
    best_obj = math.inf
    best_conv = False
    for u, converged in candidates:
        obj = evaluate_objective(prob.params, x0, u, prob.horizon)
        if obj < best_obj:
            best_u, best_obj, best_conv = u, obj, converged

    trajectory = _integrate_u_grid(prob.params, x0, best_u, prob.horizon)
    xf = trajectory.final_state
    return OCSolution(
        u_grid=best_u,
        trajectory=trajectory,
        objective=float(xf[0] + xf[1] + xf[2]),
        converged=best_conv,
    )
