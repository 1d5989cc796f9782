"""ODE integration of the swarm models with trajectory recording.

A hand-rolled Dormand-Prince 5(4) pair is the default: closed-loop
controllers make the right-hand side state-dependent (and discontinuous
for the bang-bang rule), and the engine must clamp harmless negative
undershoots, stop on steady state, and distinguish divergence from step
collapse - semantics that are simplest to guarantee per accepted step.
A fixed-step classic RK4 is available when bitwise reproducibility
matters more than error control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .control import ControlPolicy
from .equilibria import half_control_equilibrium
from .model import SwarmParams, two_segment_field

__all__ = [
    "IntegrationError",
    "StepSizeUnderflow",
    "NegativityViolation",
    "NonFiniteState",
    "NotConvergedError",
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "find_steady_state",
    "PhaseField",
    "phase_field",
]

# populations beyond this are treated as divergence; chosen so blow-ups are
# caught before error control collapses the step size
_DIVERGENCE_GUARD = 1e12
_MAX_GROWTH = 10.0
_MIN_SHRINK = 0.2
_SAFETY = 0.9


class IntegrationError(RuntimeError):
    """Base class for integrator failures; carries time and state."""

    def __init__(self, message: str, t: float, state: np.ndarray):
        super().__init__(f"{message} (t={t})")
        self.t = t
        self.state = state


class StepSizeUnderflow(IntegrationError):
    """Adaptive step collapsed below the resolvable scale (stiff or chattering)."""


class NegativityViolation(IntegrationError):
    """A population went negative beyond the clamping tolerance."""


class NonFiniteState(IntegrationError):
    """The state diverged or became non-finite."""


class NotConvergedError(RuntimeError):
    """Steady state not reached by t_end; carries the final state and RHS norm."""

    def __init__(self, t: float, state: np.ndarray, rhs_norm: float):
        super().__init__(
            f"no steady state by t={t}: max-norm RHS {rhs_norm:.3e}"
        )
        self.t = t
        self.state = state
        self.rhs_norm = rhs_norm


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    method       "rk45" (adaptive Dormand-Prince) or "rk4" (fixed step)
    step         fixed step size, required for rk4
    rel_tol/abs_tol  adaptive error control; abs_tol doubles as the
                 negative-undershoot clamping threshold
    t_end        integration horizon (0 records only the initial state)
    steady_tol   max-norm RHS threshold declaring steady state; must stay
                 above the integration-error floor (roughly the local
                 Jacobian norm times rel_tol * population), or detection
                 stalls on numerical wobble
    record_every sampling interval; None records every accepted step
    """

    method: str = "rk45"
    step: float | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_end: float = 50.0
    steady_tol: float = 1e-7
    record_every: float | None = None

    def __post_init__(self) -> None:
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "rk4" and (self.step is None or not self.step > 0):
            raise ValueError("rk4 requires a strictly positive fixed step")
        if self.step is not None and not self.step > 0:
            raise ValueError(f"step must be strictly positive, got {self.step}")
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValueError("tolerances must be strictly positive")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if not self.steady_tol > 0:
            raise ValueError("steady_tol must be strictly positive")
        if self.record_every is not None and not self.record_every > 0:
            raise ValueError("record_every must be strictly positive")


@dataclass(frozen=True)
class Trajectory:
    """Recorded closed-loop solution: strictly increasing times, one state per row."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def first_time(self, predicate) -> float | None:
        """Earliest recorded time whose state satisfies ``predicate``."""
        for t, x in zip(self.times, self.states):
            if predicate(x):
                return float(t)
        return None


# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)


def _control_function(control, rarity):
    if control is None:
        return None
    if isinstance(control, ControlPolicy):
        if callable(rarity):
            pick = rarity
        else:
            i, j = rarity
            pick = lambda x: (x[i], x[j])  # noqa: E731 - trivial adapter
        return lambda x: control.value(*pick(x))
    u = float(control)
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"constant control must lie in [0, 1], got {u}")
    return lambda x: u


def _check_finite(t: float, x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > _DIVERGENCE_GUARD:
        raise NonFiniteState("state diverged", t, x)


def _clamp_negative(t: float, x: np.ndarray, tol: float) -> np.ndarray:
    low = x.min()
    if low >= 0.0:
        return x
    if low < -tol:
        raise NegativityViolation(
            f"component went negative ({low:.3e}) beyond clamp tolerance {tol:.1e}",
            t,
            x,
        )
    return np.maximum(x, 0.0)


class _Recorder:
    """Collects (t, state) samples, either every step or on a fixed grid."""

    def __init__(self, every: float | None):
        self.every = every
        self.times: list[float] = []
        self.states: list[np.ndarray] = []
        self._next_grid = 0.0

    def push(self, t: float, x: np.ndarray, force: bool = False) -> None:
        if self.times and t <= self.times[-1]:
            return
        if not force and self.every is not None:
            if t < self._next_grid - 1e-9 * self.every:
                return
            self._next_grid += self.every
        self.times.append(t)
        self.states.append(x.copy())

    def next_record_time(self) -> float | None:
        if self.every is None:
            return None
        return self._next_grid


def _run_rk45(closed, x0, cfg: IntegratorConfig, stop_on_steady: bool):
    t = 0.0
    x = _clamp_negative(t, x0.astype(float), cfg.abs_tol)
    f = closed(x)
    _check_finite(t, x)
    rec = _Recorder(cfg.record_every)
    rec.push(t, x, force=True)
    if rec.every is not None:
        rec._next_grid = rec.every
    steady_at = None

    rhs_norm = float(np.max(np.abs(f)))
    if stop_on_steady and rhs_norm < cfg.steady_tol:
        return rec, (t, x), rhs_norm
    if cfg.t_end == 0.0:
        return rec, None, rhs_norm

    # modest first step; the controller corrects it within a few steps
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(x)
    d0 = float(np.sqrt(np.mean((x / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f / scale) ** 2)))
    h_ctrl = 0.01 * d0 / d1 if (d0 > 1e-5 and d1 > 1e-5) else 1e-6
    h_ctrl = min(h_ctrl, cfg.t_end)

    n_stage = 7
    k = [np.zeros_like(x) for _ in range(n_stage)]
    while True:
        remaining = cfg.t_end - t
        if remaining <= 1e-12 * max(1.0, cfg.t_end):
            break
        if h_ctrl < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflow("step size underflow", t, x)
        h = min(h_ctrl, remaining)
        nxt = rec.next_record_time()
        if nxt is not None and t < nxt < t + h:
            h = nxt - t

        k[0] = f
        failed = False
        err_norm = math.inf
        for i in range(1, n_stage):
            xi = x + h * sum(a * k[m] for m, a in enumerate(_A[i]))
            ki = closed(xi)
            if not np.all(np.isfinite(ki)):
                failed = True
                break
            k[i] = ki
        if not failed:
            x_new = x + h * sum(b * k[m] for m, b in enumerate(_B) if b != 0.0)
            err = h * sum(e * k[m] for m, e in enumerate(_E) if e != 0.0)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(x), np.abs(x_new))
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
            failed = not math.isfinite(err_norm) or not np.all(np.isfinite(x_new))

        if failed or err_norm > 1.0:
            _check_finite(t, x)  # reject may be caused by divergence mid-stage
            factor = _MIN_SHRINK
            if not failed and err_norm > 0.0 and math.isfinite(err_norm):
                factor = max(_MIN_SHRINK, _SAFETY * err_norm ** (-0.2))
            h_ctrl = h * min(1.0, factor)
            continue

        t += h
        x = _clamp_negative(t, x_new, cfg.abs_tol)
        _check_finite(t, x)
        f = k[6] if x is x_new else closed(x)  # FSAL unless clamping moved the state
        rec.push(t, x)

        rhs_norm = float(np.max(np.abs(f)))
        if stop_on_steady and rhs_norm < cfg.steady_tol:
            rec.push(t, x, force=True)
            steady_at = (t, x)
            break

        if err_norm == 0.0:
            h_ctrl = h * _MAX_GROWTH
        else:
            h_ctrl = h * min(_MAX_GROWTH, max(_MIN_SHRINK, _SAFETY * err_norm ** (-0.2)))

    rec.push(t, x, force=True)
    return rec, steady_at, rhs_norm


def _run_rk4(closed, x0, cfg: IntegratorConfig, stop_on_steady: bool):
    t = 0.0
    x = _clamp_negative(t, x0.astype(float), cfg.abs_tol)
    _check_finite(t, x)
    rec = _Recorder(None)  # stride-based sampling keeps steps bitwise stable
    rec.push(t, x)
    record_stride = 1
    if cfg.record_every is not None:
        record_stride = max(1, round(cfg.record_every / cfg.step))

    f = closed(x)
    rhs_norm = float(np.max(np.abs(f)))
    if stop_on_steady and rhs_norm < cfg.steady_tol:
        return rec, (t, x), rhs_norm
    if cfg.t_end == 0.0:
        return rec, None, rhs_norm

    n_steps = math.ceil(cfg.t_end / cfg.step - 1e-12)
    steady_at = None
    for step_index in range(1, n_steps + 1):
        h = min(cfg.step, cfg.t_end - t)
        k1 = f
        k2 = closed(x + 0.5 * h * k1)
        k3 = closed(x + 0.5 * h * k2)
        k4 = closed(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        x = _clamp_negative(t, x, cfg.abs_tol)
        _check_finite(t, x)
        f = closed(x)
        if step_index % record_stride == 0 or step_index == n_steps:
            rec.push(t, x)
        rhs_norm = float(np.max(np.abs(f)))
        if stop_on_steady and rhs_norm < cfg.steady_tol:
            rec.push(t, x)
            steady_at = (t, x)
            break
    return rec, steady_at, rhs_norm


def _run(field, x0, control, cfg, rarity, stop_on_steady: bool):
    u_of = _control_function(control, rarity)
    if u_of is None:
        closed = lambda x: field(x, 0.0)  # noqa: E731 - trivial adapter
    else:
        closed = lambda x: field(x, u_of(x))  # noqa: E731
    runner = _run_rk45 if cfg.method == "rk45" else _run_rk4
    rec, steady_at, rhs_norm = runner(closed, np.asarray(x0, dtype=float), cfg, stop_on_steady)
    return rec, steady_at, rhs_norm, u_of


def _trajectory(rec: _Recorder, u_of) -> Trajectory:
    times = np.array(rec.times)
    states = np.array(rec.states)
    controls = None
    if u_of is not None:
        controls = np.array([u_of(x) for x in rec.states])
    return Trajectory(times=times, states=states, controls=controls)


def integrate(field, x0, control, cfg: IntegratorConfig, rarity=(1, 2)) -> Trajectory:
    """Integrate ``dx/dt = field(x, u(x))`` from x0 to cfg.t_end.

    ``control`` is a ControlPolicy, a constant in [0, 1], or None for
    autonomous systems.  Policies read the two rarity populations from the
    state via ``rarity``: an index pair, or a callable ``x -> (a, b)`` for
    models whose policy inputs are aggregates.
    Negative undershoots within abs_tol are clamped to zero; anything
    larger raises NegativityViolation.
    """
    rec, _, _, u_of = _run(field, x0, control, cfg, rarity, stop_on_steady=False)
    return _trajectory(rec, u_of)


def find_steady_state(
    field, x0, control, cfg: IntegratorConfig, rarity=(1, 2)
) -> tuple[np.ndarray, float]:
    """First recorded state with max-norm RHS below cfg.steady_tol.

    Returns (state, time_reached); raises NotConvergedError (carrying the
    final state and its RHS norm) if the horizon ends first.
    """
    rec, steady_at, rhs_norm, _ = _run(field, x0, control, cfg, rarity, stop_on_steady=True)
    if steady_at is None:
        raise NotConvergedError(rec.times[-1], rec.states[-1], rhs_norm)
    t, x = steady_at
    return x, t


@dataclass(frozen=True)
class PhaseField:
    """Arrow grid of (dx_a, dx_b) with x_l, x_s slaved, plus corner trajectories."""

    x_a: np.ndarray
    x_b: np.ndarray
    dx_a: np.ndarray
    dx_b: np.ndarray
    slaved: tuple[float, float]
    trajectories: tuple[Trajectory, ...] = dataclass_field(default_factory=tuple)


def phase_field(
    p: SwarmParams,
    policy: ControlPolicy,
    xa_range: tuple[float, float],
    xb_range: tuple[float, float],
    resolution: int = 21,
    slaved: tuple[float, float] | None = None,
    cfg: IntegratorConfig | None = None,
    corner_trajectories: bool = True,
) -> PhaseField:
    """Sample the (x_a, x_b) projection of the two-segment vector field.

    Arrows hold (x_l, x_s) at ``slaved`` (default: their values at the
    always-present symmetric equilibrium, which is where the slow manifold
    pins them).  Trajectories are full four-dimensional closed-loop
    integrations started from the grid corners, projected onto (x_a, x_b).
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    for name, (lo, hi) in (("x_a", xa_range), ("x_b", xb_range)):
        if lo < 0 or hi < 0:
            raise ValueError(f"{name} grid bounds must be nonnegative")
        if not hi > lo:
            raise ValueError(f"{name} grid must have positive area, got [{lo}, {hi}]")
    if slaved is None:
        eq = half_control_equilibrium(p)
        slaved = (eq.x_l, eq.x_s)
    x_l, x_s = slaved

    field = two_segment_field(p)
    xa = np.linspace(xa_range[0], xa_range[1], resolution)
    xb = np.linspace(xb_range[0], xb_range[1], resolution)
    dxa = np.empty((resolution, resolution))
    dxb = np.empty((resolution, resolution))
    for i, a in enumerate(xa):
        for j, b in enumerate(xb):
            u = policy.value(a, b)
            d = field(np.array([x_l, a, b, x_s]), u)
            dxa[i, j] = d[1]
            dxb[i, j] = d[2]

    trajectories: list[Trajectory] = []
    if corner_trajectories:
        if cfg is None:
            cfg = IntegratorConfig(t_end=50.0)
        for a in (xa_range[0], xa_range[1]):
            for b in (xb_range[0], xb_range[1]):
                x0 = np.array([x_l, a, b, x_s])
                trajectories.append(integrate(field, x0, policy, cfg))

    return PhaseField(
        x_a=xa,
        x_b=xb,
        dx_a=dxa,
        dx_b=dxb,
        slaved=(float(x_l), float(x_s)),
        trajectories=tuple(trajectories),
    )
