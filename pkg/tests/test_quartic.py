from fractions import Fraction

import numpy as np
import pytest

from swarmdyn import DegenerateQuartic, quartic_invariants, solve_quartic


def test_no_real_roots_x4_plus_1():
    inv = quartic_invariants(1.0, 0.0, 0.0, 0.0, 1.0)
    assert (inv.G, inv.H, inv.I, inv.J) == (0.0, 0.0, 1.0, 0.0)
    assert inv.Delta == 1.0
    assert not inv.has_real_roots
    assert inv.classification == "no-real-roots"
    assert solve_quartic(1.0, 0.0, 0.0, 0.0, 1.0) == []


def test_real_roots_x4_minus_1():
    inv = quartic_invariants(-1.0, 0.0, 0.0, 0.0, 1.0)
    assert inv.I == -1.0
    assert inv.Delta == -1.0
    assert inv.has_real_roots
    roots = solve_quartic(-1.0, 0.0, 0.0, 0.0, 1.0)
    assert roots == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_known_factored_quartic():
    # (x - 1)(x - 2)(x^2 + 1) = x^4 - 3x^3 + 3x^2 - 3x + 2
    roots = solve_quartic(2.0, -3.0, 3.0, -3.0, 1.0)
    assert roots == pytest.approx([1.0, 2.0], abs=1e-10)


def test_four_real_roots():
    # (x^2 - 1)(x^2 - 4)
    roots = solve_quartic(4.0, 0.0, -5.0, 0.0, 1.0)
    assert roots == pytest.approx([-2.0, -1.0, 1.0, 2.0], abs=1e-10)


def test_delta_recomputes_from_stored_invariants():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = rng.uniform(-2, 2, size=5)
        if abs(a[4]) < 0.1:
            continue
        inv = quartic_invariants(*a)
        assert inv.Delta == inv.I**3 - 27 * inv.J**2


def test_classifier_agrees_with_numeric_roots():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 300:
        a = rng.uniform(-2, 2, size=5)
        if abs(a[4]) < 0.1:
            continue
        roots = solve_quartic(*a)  # raises AssertionError on any disagreement
        inv = quartic_invariants(*a)
        assert inv.has_real_roots == bool(roots)
        checked += 1


def test_polished_roots_have_small_residual():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = rng.uniform(-3, 3, size=5)
        if abs(a[4]) < 0.1:
            continue
        for x in solve_quartic(*a):
            value = a[0] + a[1] * x + a[2] * x**2 + a[3] * x**3 + a[4] * x**4
            scale = sum(abs(c) * abs(x) ** k for k, c in enumerate(a))
            assert abs(value) <= 1e-10 * max(scale, 1e-300)


def test_exact_fraction_invariants():
    # exact arithmetic flows through untouched
    inv = quartic_invariants(Fraction(2), Fraction(-3), Fraction(3), Fraction(-3), Fraction(1))
    assert isinstance(inv.I, Fraction)
    assert inv.Delta == inv.I**3 - 27 * inv.J**2
    assert inv.has_real_roots


def test_degenerate_quartic_rejected():
    with pytest.raises(DegenerateQuartic):
        quartic_invariants(1.0, 1.0, 1.0, 1.0, 0.0)
    with pytest.raises(DegenerateQuartic):
        solve_quartic(1.0, 1.0, 1.0, 1.0, 0.0)


def test_double_complex_pair_case():
    # (x^2 + 1)^2 = x^4 + 2x^2 + 1: Delta = 0 branch with H > 0 has no real roots.
    # The exact-arithmetic classifier sees Delta == 0 even though the float
    # invariants carry round-off from c2 = 2/6.
    inv = quartic_invariants(1.0, 0.0, 2.0, 0.0, 1.0)
    assert abs(inv.Delta) < 1e-12
    assert not inv.has_real_roots
    exact = quartic_invariants(Fraction(1), Fraction(0), Fraction(2), Fraction(0), Fraction(1))
    assert exact.Delta == 0
    assert not exact.has_real_roots
