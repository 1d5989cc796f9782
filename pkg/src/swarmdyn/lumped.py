"""Rare-segment dynamics with the non-rare segments lumped together.

The swarm is reinterpreted as holders of one deliberately rare segment
(``x_r``) versus holders of everything else (``x_n1``), with seeder pushes
split by the control u (probability of sharing the rare segment).  A
two-class extension separates high- and low-uplink peers; choking removes
exactly one interaction, the swap between a high-uplink rare-segment
holder and a low-uplink bulk holder, which is what makes the printed
high/low equations asymmetric.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import IntegratorConfig, NotConvergedError, find_steady_state
from .model import ParameterOrderingWarning, _require_positive
from .newton import damped_newton

__all__ = [
    "AsymmetricRates",
    "LumpedParams",
    "LumpedState",
    "ClassRates",
    "TwoClassParams",
    "TwoClassState",
    "lumped_rhs",
    "lumped_field",
    "lumped_symmetric_equilibrium",
    "two_class_rhs",
    "two_class_field",
    "SweepPoint",
    "sweep_delay_vs_u",
]


class AsymmetricRates(ValueError):
    """Closed form requires beta_r = beta_n1."""


@dataclass(frozen=True)
class LumpedParams:
    """Rates of the single-class lumped model.

    beta_r     transaction rate for the rare segment
    beta_n1    transaction rate for the lumped non-rare segments
    lambda_l, lambda_s, delta  as in the segment model

    Rare-segment transactions are at most as likely as bulk ones, so
    beta_r <= beta_n1 is expected (violations warn).
    """

    beta_r: float
    beta_n1: float
    lambda_l: float
    lambda_s: float
    delta: float

    def __post_init__(self) -> None:
        _require_positive(
            beta_r=self.beta_r,
            beta_n1=self.beta_n1,
            lambda_l=self.lambda_l,
            lambda_s=self.lambda_s,
            delta=self.delta,
        )
        if self.beta_r > self.beta_n1:
            warnings.warn(
                f"expected beta_r <= beta_n1, got {self.beta_r} > {self.beta_n1}",
                ParameterOrderingWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class LumpedState:
    """Populations (x_l, x_r, x_n1, x_s); x_r holds only the rare segment."""

    x_l: float
    x_r: float
    x_n1: float
    x_s: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not math.isfinite(float(value)) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x_l, self.x_r, self.x_n1, self.x_s], dtype=float)

    def as_dict(self) -> dict[str, float]:
        return {"x_l": self.x_l, "x_r": self.x_r, "x_n1": self.x_n1, "x_s": self.x_s}

    @classmethod
    def from_array(cls, x) -> "LumpedState":
        x_l, x_r, x_n1, x_s = (float(v) for v in x)
        return cls(x_l, x_r, x_n1, x_s)


def lumped_field(p: LumpedParams):
    """Array-native derivative function ``f(x, u) -> dx``."""
    br, bn, ll, ls, d = p.beta_r, p.beta_n1, p.lambda_l, p.lambda_s, p.delta

    def field(x: np.ndarray, u: float) -> np.ndarray:
        x_l, x_r, x_n1, x_s = x
        return np.array(
            [
                ll - (br * x_r + bn * x_n1 + (u * br + (1.0 - u) * bn) * x_s) * x_l,
                br * (u * x_s + x_r) * x_l - (bn * x_s + br * x_n1) * x_r,
                bn * ((1.0 - u) * x_s + x_n1) * x_l - br * (x_s + x_r) * x_n1,
                ls + bn * x_s * x_r + br * (2.0 * x_r + x_s) * x_n1 - d * x_s,
            ]
        )

    return field


def lumped_rhs(p: LumpedParams, s, u: float) -> np.ndarray:
    """Time derivative (dx_l, dx_r, dx_n1, dx_s) of the lumped model."""
    x = s.as_array() if isinstance(s, LumpedState) else np.asarray(s, dtype=float)
    return lumped_field(p)(x, u)


def lumped_symmetric_equilibrium(p: LumpedParams) -> LumpedState:
    """Closed-form equilibrium for equal rates under u = 1/2.

    x_r = x_n1 is the positive root of the shared symmetric quadratic:
    x* = (-(ls + ll) + sqrt((ls + ll)^2 + 2 delta^2 ll)) / (2 delta).
    """
    if p.beta_r != p.beta_n1:
        raise AsymmetricRates(
            f"closed form needs beta_r = beta_n1, got {p.beta_r} != {p.beta_n1}"
        )
    total = p.lambda_s + p.lambda_l
    x_sym = (-total + math.sqrt(total * total + 2.0 * p.delta**2 * p.lambda_l)) / (
        2.0 * p.delta
    )
    den = p.lambda_l * p.delta - x_sym * total
    # positive for all positive rates (checked defensively, no closed-form proof)
    if not den > 0:
        raise ArithmeticError(f"leecher balance denominator not positive: {den}")
    x_l = x_sym * p.lambda_l * p.delta / den
    return LumpedState(x_l=x_l, x_r=x_sym, x_n1=x_sym, x_s=total / p.delta)


@dataclass(frozen=True)
class ClassRates:
    """Per-uplink-class arrival and departure rates."""

    lambda_l: float
    lambda_s: float
    delta: float

    def __post_init__(self) -> None:
        _require_positive(
            lambda_l=self.lambda_l, lambda_s=self.lambda_s, delta=self.delta
        )


@dataclass(frozen=True)
class TwoClassParams:
    """Shared segment rates plus per-class (lo/hi uplink) population rates."""

    beta_r: float
    beta_n1: float
    lo: ClassRates
    hi: ClassRates

    def __post_init__(self) -> None:
        _require_positive(beta_r=self.beta_r, beta_n1=self.beta_n1)


@dataclass(frozen=True)
class TwoClassState:
    """Eight populations; aggregates over classes are derived on demand."""

    x_l_lo: float
    x_l_hi: float
    x_r_lo: float
    x_r_hi: float
    x_n1_lo: float
    x_n1_hi: float
    x_s_lo: float
    x_s_hi: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not math.isfinite(float(value)) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.x_l_lo,
                self.x_l_hi,
                self.x_r_lo,
                self.x_r_hi,
                self.x_n1_lo,
                self.x_n1_hi,
                self.x_s_lo,
                self.x_s_hi,
            ],
            dtype=float,
        )

    def as_dict(self) -> dict[str, float]:
        return {
            "x_l_lo": self.x_l_lo,
            "x_l_hi": self.x_l_hi,
            "x_r_lo": self.x_r_lo,
            "x_r_hi": self.x_r_hi,
            "x_n1_lo": self.x_n1_lo,
            "x_n1_hi": self.x_n1_hi,
            "x_s_lo": self.x_s_lo,
            "x_s_hi": self.x_s_hi,
        }

    @classmethod
    def from_array(cls, x) -> "TwoClassState":
        return cls(*(float(v) for v in x))

    @property
    def x_l(self) -> float:
        return self.x_l_lo + self.x_l_hi

    @property
    def x_r(self) -> float:
        return self.x_r_lo + self.x_r_hi

    @property
    def x_n1(self) -> float:
        return self.x_n1_lo + self.x_n1_hi

    @property
    def x_s(self) -> float:
        return self.x_s_lo + self.x_s_hi


# State vector layout for the two-class system.
TWO_CLASS_ORDER = (
    "x_l_lo",
    "x_l_hi",
    "x_r_lo",
    "x_r_hi",
    "x_n1_lo",
    "x_n1_hi",
    "x_s_lo",
    "x_s_hi",
)


def two_class_field(p: TwoClassParams, choking: bool = True):
    """Array-native derivative function for the two-class model.

    ``choking=True`` is the model as printed: the swap between high-uplink
    rare holders and low-uplink bulk holders is eliminated, so the rare-hi
    loss sees only x_n1_hi, the bulk-lo loss only x_r_lo, and the seeder
    gains mirror those restricted contact sets.  ``choking=False`` is a
    symmetrised sensitivity variant (not part of the source model) that
    restores the aggregate populations everywhere.
    """
    br, bn = p.beta_r, p.beta_n1
    lo, hi = p.lo, p.hi

    def field(x: np.ndarray, u: float) -> np.ndarray:
        x_l_lo, x_l_hi, x_r_lo, x_r_hi, x_n1_lo, x_n1_hi, x_s_lo, x_s_hi = x
        x_r = x_r_lo + x_r_hi
        x_n1 = x_n1_lo + x_n1_hi
        x_s = x_s_lo + x_s_hi
        if choking:
            n1_seen_by_r_hi = x_n1_hi
            r_seen_by_n1_lo = x_r_lo
        else:
            n1_seen_by_r_hi = x_n1
            r_seen_by_n1_lo = x_r

        leech_rate = br * x_r + bn * x_n1 + (u * br + (1.0 - u) * bn) * x_s
        return np.array(
            [
                lo.lambda_l - leech_rate * x_l_lo,
                hi.lambda_l - leech_rate * x_l_hi,
                br * (u * x_s + x_r) * x_l_lo - (bn * x_s + br * x_n1) * x_r_lo,
                br * (u * x_s + x_r) * x_l_hi - (bn * x_s + br * n1_seen_by_r_hi) * x_r_hi,
                bn * ((1.0 - u) * x_s + x_n1) * x_l_lo - br * (x_s + r_seen_by_n1_lo) * x_n1_lo,
                bn * ((1.0 - u) * x_s + x_n1) * x_l_hi - br * (x_s + x_r) * x_n1_hi,
                lo.lambda_s
                + (bn * x_s + br * x_n1) * x_r_lo
                + br * (x_s + r_seen_by_n1_lo) * x_n1_lo
                - lo.delta * x_s_lo,
                hi.lambda_s
                + (bn * x_s + br * n1_seen_by_r_hi) * x_r_hi
                + br * (x_s + x_r) * x_n1_hi
                - hi.delta * x_s_hi,
            ]
        )

    return field


def two_class_rhs(p: TwoClassParams, s, u: float, choking: bool = True) -> np.ndarray:
    """Time derivative of the eight-population two-class system."""
    x = s.as_array() if isinstance(s, TwoClassState) else np.asarray(s, dtype=float)
    return two_class_field(p, choking=choking)(x, u)


@dataclass(frozen=True)
class SweepPoint:
    """One steady-state evaluation of the delay-versus-control curve."""

    u: float
    sojourn: float
    converged: bool
    state: np.ndarray
    sojourn_lo: float | None = None
    sojourn_hi: float | None = None


def _steady_state(field, x0: np.ndarray, u: float, cfg: IntegratorConfig):
    """Long-horizon integration seeding a damped Newton polish."""
    try:
        x, _ = find_steady_state(field, x0, u, cfg)
        integrated_ok = True
    except NotConvergedError as err:
        x = err.state
        integrated_ok = False

    def residual(y: np.ndarray) -> np.ndarray:
        return field(y, u)

    polished, ok = damped_newton(residual, np.maximum(x, 0.0), tol=1e-11)
    if ok and np.all(polished >= -1e-12) and np.all(np.isfinite(polished)):
        return np.maximum(polished, 0.0), True
    return x, integrated_ok


def sweep_delay_vs_u(
    p: LumpedParams | TwoClassParams,
    u_grid,
    per_class: bool = False,
    cfg: IntegratorConfig | None = None,
    x0: np.ndarray | None = None,
    choking: bool = True,
) -> list[SweepPoint]:
    """Mean leecher-to-seeder delay at steady state, for each control value.

    Each grid point integrates the constant-u system to (near) stationarity
    and polishes the endpoint with damped Newton.  Non-converged points are
    flagged but kept so the curve is always complete.
    """
    u_values = [float(u) for u in u_grid]
    if not u_values:
        raise ValueError("u_grid must not be empty")
    for u in u_values:
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"control values must lie in [0, 1], got {u}")
    if cfg is None:
        # coarse integration only seeds the Newton polish
        cfg = IntegratorConfig(t_end=2000.0, steady_tol=1e-6)

    two_class = isinstance(p, TwoClassParams)
    if two_class:
        field = two_class_field(p, choking=choking)
        start = np.zeros(8) if x0 is None else np.asarray(x0, dtype=float)
        lambda_l = p.lo.lambda_l + p.hi.lambda_l
    else:
        field = lumped_field(p)
        start = np.zeros(4) if x0 is None else np.asarray(x0, dtype=float)
        lambda_l = p.lambda_l

    points: list[SweepPoint] = []
    for u in u_values:
        x, converged = _steady_state(field, start, u, cfg)
        if two_class:
            s = TwoClassState.from_array(np.maximum(x, 0.0))
            sojourn = (s.x_l + s.x_r + s.x_n1) / lambda_l
            point = SweepPoint(
                u=u,
                sojourn=sojourn,
                converged=converged,
                state=x,
                sojourn_lo=(s.x_l_lo + s.x_r_lo + s.x_n1_lo) / p.lo.lambda_l
                if per_class
                else None,
                sojourn_hi=(s.x_l_hi + s.x_r_hi + s.x_n1_hi) / p.hi.lambda_l
                if per_class
                else None,
            )
        else:
            x_l, x_r, x_n1, _ = np.maximum(x, 0.0)
            point = SweepPoint(
                u=u,
                sojourn=(x_l + x_r + x_n1) / lambda_l,
                converged=converged,
                state=x,
            )
        points.append(point)
    return points
