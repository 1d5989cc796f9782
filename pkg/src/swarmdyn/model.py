"""Compartment models of a single file-sharing swarm.

Populations are continuous nonnegative counts; every rate constant is per
unit time.  The two-segment system tracks leechers holding no segment
(``x_l``), holders of exactly one segment (``x_a``, ``x_b``) and seeders
(``x_s``).  Transaction rates follow mass-action kinetics: each successful
transfer is proportional to the product of the two interacting populations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParameterOrderingWarning",
    "SwarmParams",
    "SwarmState",
    "SeederLifetimeParams",
    "two_segment_rhs",
    "two_segment_field",
    "one_segment_rhs",
    "one_segment_field",
    "one_segment_equilibrium",
    "effective_death_rate",
]


class ParameterOrderingWarning(UserWarning):
    """A soft parameter-ordering assumption does not hold."""


def _require_positive(**fields) -> None:
    for name, value in fields.items():
        if not math.isfinite(float(value)) or not value > 0:
            raise ValueError(f"{name} must be strictly positive and finite, got {value!r}")


@dataclass(frozen=True)
class SwarmParams:
    """Rate constants of the one- and two-segment swarm models.

    beta      client-server rate for a single segment
    gamma     swap/trade rate between holders of complementary segments
    lambda_l  exogenous leecher arrival rate
    lambda_s  exogenous seeder arrival rate
    delta     seeder departure rate
    beta0     client-server rate for the whole file (one-segment model
              only; may be left unset when only the two-segment system
              is used)

    Swap transactions carry stronger server incentives than plain
    client-server transfers, and pushing the whole file in one shot is the
    least attractive of all, so gamma >= beta > beta0 is the expected
    ordering.  Violations are reported as warnings rather than errors
    because lumped-model scenarios legitimately use equal rates.
    """

    beta: float
    gamma: float
    lambda_l: float
    lambda_s: float
    delta: float
    beta0: float | None = None

    def __post_init__(self) -> None:
        _require_positive(
            beta=self.beta,
            gamma=self.gamma,
            lambda_l=self.lambda_l,
            lambda_s=self.lambda_s,
            delta=self.delta,
        )
        if self.beta0 is not None:
            _require_positive(beta0=self.beta0)
            if not self.beta > self.beta0:
                warnings.warn(
                    f"expected beta > beta0, got beta={self.beta} beta0={self.beta0}",
                    ParameterOrderingWarning,
                    stacklevel=2,
                )
        if not self.gamma >= self.beta:
            warnings.warn(
                f"expected gamma >= beta, got gamma={self.gamma} beta={self.beta}",
                ParameterOrderingWarning,
                stacklevel=2,
            )

    @property
    def total_arrival_rate(self) -> float:
        return self.lambda_l + self.lambda_s


@dataclass(frozen=True)
class SwarmState:
    """Population vector (x_l, x_a, x_b, x_s); componentwise >= 0."""

    x_l: float
    x_a: float
    x_b: float
    x_s: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not math.isfinite(float(value)):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x_l, self.x_a, self.x_b, self.x_s], dtype=float)

    def as_dict(self) -> dict[str, float]:
        return {"x_l": self.x_l, "x_a": self.x_a, "x_b": self.x_b, "x_s": self.x_s}

    @classmethod
    def from_array(cls, x) -> "SwarmState":
        x_l, x_a, x_b, x_s = (float(v) for v in x)
        return cls(x_l, x_a, x_b, x_s)

    @property
    def leecher_side_total(self) -> float:
        """Mass still waiting for the full file: x_l + x_a + x_b."""
        return self.x_l + self.x_a + self.x_b


@dataclass(frozen=True)
class SeederLifetimeParams:
    """Inputs of the mixed seeder-lifetime computation.

    Ex-leechers seed briefly (departure rate delta_l) while exogenous
    seeders stay much longer (delta_s), so delta_s < delta_l is expected.
    """

    lambda_l: float
    lambda_s: float
    delta_l: float
    delta_s: float

    def __post_init__(self) -> None:
        _require_positive(
            lambda_l=self.lambda_l,
            lambda_s=self.lambda_s,
            delta_l=self.delta_l,
            delta_s=self.delta_s,
        )
        if not self.delta_s < self.delta_l:
            warnings.warn(
                "expected long-lived exogenous seeders (delta_s < delta_l), got "
                f"delta_s={self.delta_s} delta_l={self.delta_l}",
                ParameterOrderingWarning,
                stacklevel=2,
            )


def effective_death_rate(q: SeederLifetimeParams) -> float:
    """Departure rate of a typical seeder.

    The steady seeder pool mixes ex-leechers (mean count lambda_l/delta_l)
    with exogenous long-lived seeders (lambda_s/delta_s); the typical mean
    lifetime 1/delta is the average of 1/delta_l and 1/delta_s weighted by
    those pool sizes.
    """
    w_l = q.lambda_l / q.delta_l
    w_s = q.lambda_s / q.delta_s
    mean_lifetime = (w_l / q.delta_l + w_s / q.delta_s) / (w_l + w_s)
    return 1.0 / mean_lifetime


def _state_array(state, size: int) -> np.ndarray:
    if isinstance(state, SwarmState):
        return state.as_array()
    x = np.asarray(state, dtype=float)
    if x.shape != (size,):
        raise ValueError(f"state must have shape ({size},), got {x.shape}")
    return x


def two_segment_rhs(p: SwarmParams, s, u: float) -> np.ndarray:
    """Time derivative (dx_l, dx_a, dx_b, dx_s) of the two-segment system.

    ``u`` in [0, 1] is the probability that a seeder-to-leecher push
    carries segment a.  Segment holders complete the file either from a
    seeder (rate beta) or by swapping with a holder of the complementary
    segment (rate gamma, completing both parties).
    """
    x = _state_array(s, 4)
    x_l, x_a, x_b, x_s = x
    b, g = p.beta, p.gamma
    return np.array(
        [
            p.lambda_l - b * x_l * (x_a + x_b + x_s),
            -x_a * (b * x_s + g * x_b) + b * x_l * (x_a + u * x_s),
            -x_b * (b * x_s + g * x_a) + b * x_l * (x_b + (1.0 - u) * x_s),
            p.lambda_s + b * (x_a + x_b) * x_s + 2.0 * g * x_a * x_b - p.delta * x_s,
        ]
    )


def two_segment_field(p: SwarmParams):
    """Array-native derivative function ``f(x, u) -> dx`` for the integrator."""

    b, g, ll, ls, d = p.beta, p.gamma, p.lambda_l, p.lambda_s, p.delta

    def field(x: np.ndarray, u: float) -> np.ndarray:
        x_l, x_a, x_b, x_s = x
        return np.array(
            [
                ll - b * x_l * (x_a + x_b + x_s),
                -x_a * (b * x_s + g * x_b) + b * x_l * (x_a + u * x_s),
                -x_b * (b * x_s + g * x_a) + b * x_l * (x_b + (1.0 - u) * x_s),
                ls + b * (x_a + x_b) * x_s + 2.0 * g * x_a * x_b - d * x_s,
            ]
        )

    return field


def _beta0(p: SwarmParams) -> float:
    if p.beta0 is None:
        raise ValueError("one-segment model requires beta0 to be set on SwarmParams")
    return p.beta0


def one_segment_rhs(p: SwarmParams, x_l: float, x_s: float) -> np.ndarray:
    """Derivative (dx_l, dx_s) of the unsegmented client-server model."""
    b0 = _beta0(p)
    return np.array(
        [
            -b0 * x_l * x_s + p.lambda_l,
            b0 * x_l * x_s - p.delta * x_s + p.lambda_s,
        ]
    )


def one_segment_field(p: SwarmParams):
    """Array-native derivative function for the one-segment model (u ignored)."""
    b0, ll, ls, d = _beta0(p), p.lambda_l, p.lambda_s, p.delta

    def field(x: np.ndarray, u: float) -> np.ndarray:
        x_l, x_s = x
        return np.array([-b0 * x_l * x_s + ll, b0 * x_l * x_s - d * x_s + ls])

    return field


def one_segment_equilibrium(p: SwarmParams) -> tuple[float, float]:
    """Globally attracting equilibrium (x_l*, x_s*) of the one-segment model."""
    b0 = _beta0(p)
    x_l = p.delta * p.lambda_l / (b0 * (p.lambda_s + p.lambda_l))
    x_s = (p.lambda_l + p.lambda_s) / p.delta
    return x_l, x_s
