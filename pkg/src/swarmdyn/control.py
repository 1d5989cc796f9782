"""Dissemination controllers: closed-loop rules mapping (x_a, x_b) to u in [0, 1].

``u`` is the fraction of seeder pushes that carry segment a.  All policies
return exactly 1/2 in the empty-swarm 0/0 case so the closed-loop vector
field stays continuous at the origin, matching the symmetric tie value.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "ControlPolicy",
    "Constant",
    "ContinuousRarest",
    "BangBang",
    "ControlledRarity",
    "Inverted",
    "control_value",
]


class ControlPolicy:
    """Base class; subclasses implement ``value(x_a, x_b) -> u``."""

    def value(self, x_a: float, x_b: float) -> float:
        raise NotImplementedError

    def __call__(self, x_a: float, x_b: float) -> float:
        return self.value(x_a, x_b)


@dataclass(frozen=True)
class Constant(ControlPolicy):
    """State-independent control u(x) = u."""

    u: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.u <= 1.0:
            raise ValueError(f"constant control must lie in [0, 1], got {self.u}")

    def value(self, x_a: float, x_b: float) -> float:
        return self.u


@dataclass(frozen=True)
class ContinuousRarest(ControlPolicy):
    """Continuous globally-rarest-first: u = x_b / (x_a + x_b)."""

    def value(self, x_a: float, x_b: float) -> float:
        total = x_a + x_b
        if total == 0.0:
            return 0.5
        return x_b / total


@dataclass(frozen=True)
class BangBang(ControlPolicy):
    """Discrete rarest-first: push only the rarer segment, 1/2 on a tie.

    Exact equality has measure zero in floating point and a hard switch
    chatters, so the tie branch spans a band of width ``tie_tol`` around
    the diagonal.  ``tie_tol=None`` selects the state-scaled default
    1e-7 * (x_a + x_b + 1); pass 0.0 for the exact-equality rule.  The
    band must stay wider than the integrator's landing precision
    (~rel_tol * population) or the closed loop chatters across the switch
    at nanoscale steps.
    """

    tie_tol: float | None = None

    def __post_init__(self) -> None:
        if self.tie_tol is not None and self.tie_tol < 0:
            raise ValueError(f"tie_tol must be nonnegative, got {self.tie_tol}")

    def value(self, x_a: float, x_b: float) -> float:
        band = self.tie_tol
        if band is None:
            band = 1e-7 * (x_a + x_b + 1.0)
        if x_a < x_b - band:
            return 1.0
        if x_a > x_b + band:
            return 0.0
        return 0.5


@dataclass(frozen=True)
class ControlledRarity(ControlPolicy):
    """Deliberately biased dissemination: u = x_a / (x_a + k x_b), k > 0.

    For k > 1 the seeders increasingly favour segment b even when a is
    rarer, keeping one segment scarce and stretching leecher sojourns.
    """

    k: float

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise ValueError(f"k must be strictly positive, got {self.k}")

    def value(self, x_a: float, x_b: float) -> float:
        den = x_a + self.k * x_b
        if den == 0.0:
            return 0.5
        return x_a / den


@dataclass(frozen=True)
class Inverted(ControlPolicy):
    """Complement of another policy: u = 1 - inner(x_a, x_b)."""

    inner: ControlPolicy

    def value(self, x_a: float, x_b: float) -> float:
        return 1.0 - self.inner.value(x_a, x_b)


def control_value(policy: ControlPolicy, x_a: float, x_b: float) -> float:
    """Evaluate a policy on the nonnegative quadrant."""
    if x_a < 0 or x_b < 0:
        raise ValueError("segment populations must be nonnegative")
    return policy.value(x_a, x_b)
