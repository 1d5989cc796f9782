"""Stationary-point analysis of the two-segment swarm.

Closed forms cover the symmetric (x_a = x_b) equilibrium shared by the
constant-1/2, bang-bang and continuous rarest-first controllers, plus the
u = 1 boundary equilibrium.  Under the continuous rarest-first rule the
remaining candidates reduce, after eliminating x_l and x_s through the
leecher and seeder balance equations, to the real roots of a quartic in
x_b; each sign-feasible root is lifted back to a full four-population
state and verified against the vector field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .control import ContinuousRarest
from .model import SwarmParams, SwarmState, two_segment_field
from .newton import damped_newton, fd_jacobian
from .quartic import QuarticInvariants, quartic_invariants, solve_quartic

__all__ = [
    "SingularDenominator",
    "OutOfRegimeWarning",
    "DiscriminantParams",
    "StabilityInfo",
    "EquilibriumSet",
    "half_control_equilibrium",
    "u1_equilibrium",
    "xl_xs_from_xab",
    "xa_from_xb",
    "quad_positive_root",
    "quartic_coeffs",
    "discriminant_lambda_bounds",
    "continuous_control_equilibria",
    "littles_sojourn",
]


class SingularDenominator(ZeroDivisionError):
    """beta (x_a + x_b) = delta: the seeder balance cannot be inverted."""


class OutOfRegimeWarning(UserWarning):
    """Inputs fall outside the skew regime lambda_l >= delta >= lambda_s."""


def half_control_equilibrium(p: SwarmParams) -> SwarmState:
    """Symmetric equilibrium of the two-segment system under u = 1/2.

    x_a = x_b = sigma/2 where sigma is the unique positive root of
    sigma^2 + 2 kappa sigma - 2 lambda_l / gamma,
    kappa = beta (lambda_l + lambda_s) / (gamma delta).
    """
    total = p.total_arrival_rate
    kappa = p.beta * total / (p.gamma * p.delta)
    sigma = -kappa + math.sqrt(kappa * kappa + 2.0 * p.lambda_l / p.gamma)
    x_s = total / p.delta
    x_l = (p.lambda_l / p.beta) / (sigma + x_s)
    return SwarmState(x_l=x_l, x_a=sigma / 2.0, x_b=sigma / 2.0, x_s=x_s)


def u1_equilibrium(p: SwarmParams) -> SwarmState:
    """Boundary equilibrium reached when segment a is always pushed (u = 1).

    Segment b dies out; the a-population settles where leecher inflow
    balances completion through seeders.
    """
    total = p.total_arrival_rate
    x_a = p.lambda_l * p.delta / (total * p.beta)
    x_s = total / p.delta
    x_l = p.lambda_l / (p.beta * (x_a + x_s))
    return SwarmState(x_l=x_l, x_a=x_a, x_b=0.0, x_s=x_s)


def xl_xs_from_xab(p: SwarmParams, x_a: float, x_b: float) -> tuple[float, float]:
    """Eliminate (x_l, x_s) via the leecher and seeder balance equations."""
    den = p.beta * (x_a + x_b) - p.delta
    if abs(den) <= 1e-12 * (p.beta * (x_a + x_b) + p.delta):
        raise SingularDenominator(
            f"beta (x_a + x_b) - delta vanishes at x_a={x_a}, x_b={x_b}"
        )
    ratio = (p.lambda_s + 2.0 * p.gamma * x_a * x_b) / den
    x_s = -ratio
    x_l = (p.lambda_l / p.beta) / (x_a + x_b - ratio)
    return x_l, x_s


def xa_from_xb(p: SwarmParams, x_b: float) -> float:
    """x_a solving the summed segment balance d(x_a + x_b)/dt = 0 at given x_b."""
    total = p.total_arrival_rate
    return (p.lambda_l * p.delta - p.beta * total * x_b) / (
        2.0 * p.gamma * p.delta * x_b + p.beta * total
    )


def quad_positive_root(p: SwarmParams) -> float:
    """Unique positive root of 2 gamma delta x^2 + 2 beta (ll + ls) x - ll delta.

    This is the shared symmetric value x_a = x_b of every controller that
    returns 1/2 on the diagonal.
    """
    total = p.total_arrival_rate
    b_term = p.beta * total
    root = math.sqrt(b_term * b_term + 2.0 * p.lambda_l * p.gamma * p.delta * p.delta)
    return (-2.0 * b_term + 2.0 * root) / (4.0 * p.gamma * p.delta)


def quartic_coeffs(p: SwarmParams):
    """Coefficients (a0..a4) of the off-diagonal equilibrium quartic in x_b.

    Plain scalar arithmetic: exact-rational parameter values produce exact
    coefficients, which the invariant tests rely on.
    """
    b, g, ll, ls, d = p.beta, p.gamma, p.lambda_l, p.lambda_s, p.delta
    a0 = ll**4 * b**2 + ls**3 * b**2 * ll + 3 * ls * b**2 * ll**3 + 3 * ls**2 * b**2 * ll**2
    a1 = 3 * ls**2 * ll * d * g * b - ll**2 * g * d**3 + 6 * ls * ll**2 * d * g * b + 3 * d * g * b * ll**3
    a2 = (
        3 * b**2 * ls * ll**2 * g
        + 3 * b**2 * ls**2 * ll * g
        + g * d**2 * ll * b * ls
        + 2 * g**2 * ll * d**2 * ls
        + 2 * g**2 * ll**2 * d**2
        + g * b * d**2 * ll**2
        + b**2 * g * ls**3
        + b**2 * g * ll**3
    )
    a3 = 4 * ls * ll * d * g**2 * b + 2 * ls**2 * d * g**2 * b + 2 * ll**2 * d * g**2 * b - 2 * g**2 * d**3 * ll
    a4 = 2 * g**2 * d**2 * ll * b + 2 * g**2 * d**2 * b * ls
    return a0, a1, a2, a3, a4


@dataclass(frozen=True)
class DiscriminantParams:
    """Skew coordinates for the real-root onset of the equilibrium quartic.

    eta = lambda_l / delta and xi = delta / lambda_s; the closed-form seeder
    arrival bounds assume the regime lambda_l >= delta >= lambda_s, i.e.
    eta, xi >= 1.  Values outside the regime are allowed but tagged with a
    warning because the bounds are then extrapolations.
    """

    beta: float
    gamma: float
    eta: float
    xi: float

    def __post_init__(self) -> None:
        for name in ("beta", "gamma", "eta", "xi"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(float(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.eta < 1 or self.xi < 1:
            warnings.warn(
                f"eta={self.eta}, xi={self.xi} outside the skew regime (eta, xi >= 1)",
                OutOfRegimeWarning,
                stacklevel=2,
            )

    @classmethod
    def from_params(cls, p: SwarmParams) -> "DiscriminantParams":
        return cls(
            beta=p.beta,
            gamma=p.gamma,
            eta=p.lambda_l / p.delta,
            xi=p.delta / p.lambda_s,
        )

    def swarm_params(self, lambda_s: float) -> SwarmParams:
        """Concrete rate set at seeder arrival rate lambda_s, holding eta, xi."""
        delta = self.xi * lambda_s
        return SwarmParams(
            beta=self.beta,
            gamma=self.gamma,
            lambda_l=self.eta * delta,
            lambda_s=lambda_s,
            delta=delta,
        )


def discriminant_lambda_bounds(d: DiscriminantParams) -> tuple[float, float]:
    """Seeder arrival rates (lambda0, lambda1) bracketing the no-real-root window.

    For lambda_s strictly between the bounds the equilibrium quartic has no
    real roots and the symmetric point is the only equilibrium; outside, at
    least two real roots (hence off-diagonal candidates) appear.
    """
    b, g = d.beta, d.gamma
    pre = (d.eta * d.xi + 1.0) ** 2 / (4.0 * g * d.xi**3 * d.eta)
    mid = 10.0 * b * g + g * g
    rad = math.sqrt(68.0 * b**2 * g**2 + 20.0 * b * g**3 + g**4 + 64.0 * g * b**3)
    return pre * (mid - rad), pre * (mid + rad)


@dataclass(frozen=True)
class StabilityInfo:
    """Linearisation summary of an equilibrium under the closed-loop field."""

    max_real_eigenvalue: float
    stable: bool


@dataclass(frozen=True)
class EquilibriumSet:
    """All verified stationary points under continuous rarest-first control."""

    on_diagonal: SwarmState
    off_diagonal: tuple[SwarmState, ...]
    invariants: QuarticInvariants
    classification: str
    on_diagonal_stability: StabilityInfo
    off_diagonal_stability: tuple[StabilityInfo, ...]

    def to_report(self, p: SwarmParams) -> dict:
        """JSON-ready report: parameters, invariants, states, sojourns."""

        def point(state: SwarmState, stab: StabilityInfo) -> dict:
            return {
                "state": state.as_dict(),
                "sojourn": littles_sojourn(state, p.lambda_l),
                "stable": stab.stable,
                "max_real_eigenvalue": stab.max_real_eigenvalue,
            }

        d = DiscriminantParams.from_params(p)
        lam0, lam1 = discriminant_lambda_bounds(d)
        return {
            "parameters": {
                "beta": p.beta,
                "gamma": p.gamma,
                "lambda_l": p.lambda_l,
                "lambda_s": p.lambda_s,
                "delta": p.delta,
            },
            "skew": {"eta": d.eta, "xi": d.xi, "in_regime": d.eta >= 1 and d.xi >= 1},
            "lambda_bounds": {"lambda0": lam0, "lambda1": lam1},
            "quartic_invariants": {
                "G": self.invariants.G,
                "H": self.invariants.H,
                "I": self.invariants.I,
                "J": self.invariants.J,
                "Delta": self.invariants.Delta,
            },
            "classification": self.classification,
            "on_diagonal": point(self.on_diagonal, self.on_diagonal_stability),
            "off_diagonal": [
                point(s, st)
                for s, st in zip(self.off_diagonal, self.off_diagonal_stability)
            ],
        }


def _closed_loop_field(p: SwarmParams):
    field = two_segment_field(p)
    policy = ContinuousRarest()

    def closed(x: np.ndarray) -> np.ndarray:
        return field(x, policy.value(x[1], x[2]))

    return closed


def _stability(closed, x: np.ndarray) -> StabilityInfo:
    eigs = np.linalg.eigvals(fd_jacobian(closed, x))
    max_real = float(np.max(eigs.real))
    return StabilityInfo(max_real_eigenvalue=max_real, stable=max_real < 0.0)


def continuous_control_equilibria(
    p: SwarmParams, verify_tol: float = 1e-8
) -> EquilibriumSet:
    """Every equilibrium of the closed-loop continuous rarest-first system.

    The symmetric point always exists.  Off-diagonal candidates are the
    positive real roots of the equilibrium quartic, lifted to full states,
    polished by damped Newton on the closed-loop field, and kept only if the
    residual max-norm beats ``verify_tol``; sign-infeasible roots are
    extraneous and dropped.
    """
    total = p.total_arrival_rate
    root = math.sqrt(
        p.beta**2 * total**2 + 2.0 * p.lambda_l * p.gamma * p.delta**2
    )
    x_l_on = (
        p.lambda_l
        * p.gamma
        * p.delta
        / (p.beta * (total * (p.gamma - p.beta) + root))
    )
    xab = quad_positive_root(p)
    on_diagonal = SwarmState(x_l=x_l_on, x_a=xab, x_b=xab, x_s=total / p.delta)

    coeffs = quartic_coeffs(p)
    invariants = quartic_invariants(*coeffs)
    closed = _closed_loop_field(p)

    off: list[SwarmState] = []
    for x_b in solve_quartic(*coeffs):
        if x_b <= 0:
            continue
        x_a = xa_from_xb(p, x_b)
        if x_a <= 0:
            continue
        if abs(x_a - x_b) <= 1e-7 * (x_a + x_b):
            continue  # duplicate of the symmetric point
        try:
            x_l, x_s = xl_xs_from_xab(p, x_a, x_b)
        except SingularDenominator:
            continue
        if x_l <= 0 or x_s <= 0:
            continue
        candidate = np.array([x_l, x_a, x_b, x_s])
        polished, _ = damped_newton(closed, candidate, tol=1e-13)
        if float(np.max(np.abs(closed(polished)))) >= verify_tol:
            continue
        if np.any(polished <= 0):
            continue
        state = SwarmState.from_array(polished)
        if any(
            abs(state.x_a - s.x_a) <= 1e-8 * (1.0 + s.x_a)
            and abs(state.x_b - s.x_b) <= 1e-8 * (1.0 + s.x_b)
            for s in off
        ):
            continue
        off.append(state)
    off.sort(key=lambda s: s.x_a)

    return EquilibriumSet(
        on_diagonal=on_diagonal,
        off_diagonal=tuple(off),
        invariants=invariants,
        classification=invariants.classification,
        on_diagonal_stability=_stability(closed, on_diagonal.as_array()),
        off_diagonal_stability=tuple(
            _stability(closed, s.as_array()) for s in off
        ),
    )


def littles_sojourn(s: SwarmState, lambda_l: float) -> float:
    """Mean leecher-to-seeder delay at a stationary regime.

    Little's law: average population = arrival rate x average sojourn, so
    the waiting mass (x_l + x_a + x_b) over the leecher arrival rate is the
    mean time from joining the swarm to seeding.
    """
    if not lambda_l > 0:
        raise ValueError(f"lambda_l must be strictly positive, got {lambda_l}")
    return s.leecher_side_total / lambda_l
