"""Real-root analysis of quartic polynomials a0 + a1 x + a2 x^2 + a3 x^3 + a4 x^4.

Two independent routes are provided on purpose: an algebraic classifier
built from the invariants of the binary-form normalisation, and a numeric
companion-matrix solver with Newton polishing.  Each checks the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DegenerateQuartic",
    "QuarticInvariants",
    "quartic_invariants",
    "solve_quartic",
]

NO_REAL_ROOTS = "no-real-roots"
REAL_ROOTS_EXIST = "real-roots-exist"


class DegenerateQuartic(ValueError):
    """Leading coefficient a4 is zero: not a quartic."""


@dataclass(frozen=True)
class QuarticInvariants:
    """Invariants of the normal form f = c0 + 4c1 x + 6c2 x^2 + 4c3 x^3 + c4 x^4.

    G = c4^2 c1 - 3 c4 c3 c2 + 2 c3^3
    H = c4 c2 - c3^2
    I = c4 c0 - 4 c3 c1 + 3 c2^2
    J = det [[c4, c3, c2], [c3, c2, c1], [c2, c1, c0]]
    Delta = I^3 - 27 J^2

    ``has_real_roots`` is decided in exact rational arithmetic so the
    boundary comparisons are free of round-off.
    """

    G: float
    H: float
    I: float
    J: float
    Delta: float
    has_real_roots: bool

    @property
    def classification(self) -> str:
        return REAL_ROOTS_EXIST if self.has_real_roots else NO_REAL_ROOTS


def _invariant_terms(a0, a1, a2, a3, a4):
    # int divisors keep the arithmetic in the inputs' type (float or Fraction)
    c0, c1, c2, c3, c4 = a0, a1 / 4, a2 / 6, a3 / 4, a4
    g = c4 * c4 * c1 - 3 * c4 * c3 * c2 + 2 * c3 * c3 * c3
    h = c4 * c2 - c3 * c3
    i = c4 * c0 - 4 * c3 * c1 + 3 * c2 * c2
    j = (
        c4 * c2 * c0
        + 2 * c3 * c2 * c1
        - c2 * c2 * c2
        - c4 * c1 * c1
        - c0 * c3 * c3
    )
    return c4, g, h, i, j


def _no_real_roots_exact(a0, a1, a2, a3, a4) -> bool:
    """Exact classification: True iff the quartic has no real roots.

    No real roots iff either Delta > 0 with (H >= 0 or 12 H^2 - c4^2 I < 0),
    or the degenerate double-complex-pair case Delta = 0, G = 0,
    12 H^2 - c4^2 I = 0, H > 0.
    """
    coeffs = [Fraction(v) for v in (a0, a1, a2, a3, a4)]
    c4, g, h, i, j = _invariant_terms(*coeffs)
    delta = i**3 - 27 * j**2
    aux = 12 * h**2 - c4**2 * i
    if delta > 0:
        return h >= 0 or aux < 0
    if delta == 0:
        return g == 0 and aux == 0 and h > 0
    return False


def quartic_invariants(a0, a1, a2, a3, a4) -> QuarticInvariants:
    """Invariants and real-root classification of a quartic.

    Arithmetic is performed in the native type of the inputs, so exact
    ``fractions.Fraction`` coefficients yield exact invariants.
    """
    if a4 == 0:
        raise DegenerateQuartic("a4 must be nonzero")
    _, g, h, i, j = _invariant_terms(a0, a1, a2, a3, a4)
    return QuarticInvariants(
        G=g,
        H=h,
        I=i,
        J=j,
        Delta=i**3 - 27 * j**2,
        has_real_roots=not _no_real_roots_exact(a0, a1, a2, a3, a4),
    )


def _polish(coeffs: np.ndarray, x: float) -> float:
    # Newton refinement on p(x) = sum coeffs[k] x^k; stops early on stall.
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    for _ in range(50):
        p = _horner(coeffs, x)
        if p == 0.0:
            return x
        dp = _horner(deriv, x)
        if dp == 0.0:
            return x
        step = p / dp
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            return x
        x -= step
    return x


def _horner(coeffs: np.ndarray, x: float) -> float:
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def _residual_scale(coeffs: np.ndarray, x: float) -> float:
    return float(sum(abs(c) * abs(x) ** k for k, c in enumerate(coeffs)))


def solve_quartic(a0, a1, a2, a3, a4) -> list[float]:
    """All real roots, ascending, polished to small relative residual.

    Roots come from the eigenvalues of the companion matrix (robust near
    double roots) and are refined by Newton steps.  The result is checked
    against the invariant classifier; a mismatch raises AssertionError.
    """
    if a4 == 0:
        raise DegenerateQuartic("a4 must be nonzero")
    coeffs = np.array([a0, a1, a2, a3, a4], dtype=float)
    raw = np.roots(coeffs[::-1])
    real_roots: list[float] = []
    for z in raw:
        if abs(z.imag) > 1e-7 * (1.0 + abs(z.real)):
            continue
        x = _polish(coeffs, float(z.real))
        scale = _residual_scale(coeffs, x)
        if abs(_horner(coeffs, x)) > 1e-10 * max(scale, 1e-300):
            continue
        if not any(abs(x - r) <= 1e-9 * (1.0 + abs(r)) for r in real_roots):
            real_roots.append(x)
    real_roots.sort()

    inv = quartic_invariants(a0, a1, a2, a3, a4)
    assert inv.has_real_roots == bool(real_roots), (
        "invariant classifier and companion-matrix roots disagree: "
        f"classifier={inv.classification} roots={real_roots}"
    )
    return real_roots
