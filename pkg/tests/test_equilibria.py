from fractions import Fraction

import numpy as np
import pytest
from _oracles import (
    discriminant_sign_cofactor,
    factorization_denominator,
    midpoint_quadratic_value,
    midpoint_seeder_rate,
)
from conftest import rarest_first_residual

from swarmdyn import (
    ContinuousRarest,
    DiscriminantParams,
    OutOfRegimeWarning,
    SingularDenominator,
    SwarmParams,
    continuous_control_equilibria,
    discriminant_lambda_bounds,
    half_control_equilibrium,
    littles_sojourn,
    quad_positive_root,
    quartic_coeffs,
    quartic_invariants,
    solve_quartic,
    two_segment_field,
    u1_equilibrium,
    xa_from_xb,
    xl_xs_from_xab,
)


def random_params(rng) -> SwarmParams:
    b = rng.uniform(0.2, 4.0)
    return SwarmParams(
        beta=b,
        gamma=b + rng.uniform(0.0, 4.0),
        lambda_l=rng.uniform(0.2, 6.0),
        lambda_s=rng.uniform(0.05, 4.0),
        delta=rng.uniform(0.2, 5.0),
    )


class TestHalfControlEquilibrium:
    def test_closed_form_values(self, fig1_params):
        eq = half_control_equilibrium(fig1_params)
        assert eq.x_l == pytest.approx(12 / 19, abs=1e-14)
        assert eq.x_a == pytest.approx(1 / 3, abs=1e-14)
        assert eq.x_b == pytest.approx(1 / 3, abs=1e-14)
        assert eq.x_s == pytest.approx(2.5, abs=1e-14)

    def test_matches_reported_skew_value(self, skew_params):
        eq = half_control_equilibrium(skew_params)
        assert eq.x_a == pytest.approx(2.248, abs=1e-3)

    def test_is_a_stationary_point(self, fig1_params):
        eq = half_control_equilibrium(fig1_params)
        field = two_segment_field(fig1_params)
        assert np.max(np.abs(field(eq.as_array(), 0.5))) < 1e-10


class TestU1Equilibrium:
    def test_closed_form(self, fig1_params):
        eq = u1_equilibrium(fig1_params)
        assert eq.x_a == pytest.approx(0.8, abs=1e-14)
        assert eq.x_b == 0.0

    def test_stationary_under_full_push(self, fig1_params):
        eq = u1_equilibrium(fig1_params)
        field = two_segment_field(fig1_params)
        assert np.max(np.abs(field(eq.as_array(), 1.0))) < 1e-10

    def test_b_face_is_invariant(self, fig1_params):
        # with x_b = 0 and u = 1 every d(x_b)/dt term carries x_b or (1 - u)
        field = two_segment_field(fig1_params)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(0, 4, size=4)
            x[2] = 0.0
            assert field(x, 1.0)[2] == 0.0


class TestBalanceElimination:
    def test_consistent_with_symmetric_point(self, fig1_params):
        x_l, x_s = xl_xs_from_xab(fig1_params, 1 / 3, 1 / 3)
        assert x_l == pytest.approx(12 / 19, abs=1e-14)
        assert x_s == pytest.approx(2.5, abs=1e-14)

    def test_seeder_population_fixed_by_conservation(self, skew_params):
        # at any true equilibrium x_s = (lambda_l + lambda_s) / delta
        _, x_s = xl_xs_from_xab(skew_params, 5.237, 0.772)
        assert x_s == pytest.approx(88.4 / 44, abs=1e-2)

    def test_singular_denominator(self, fig1_params):
        x = fig1_params.delta / fig1_params.beta / 2.0
        with pytest.raises(SingularDenominator):
            xl_xs_from_xab(fig1_params, x, x)


class TestSegmentBalanceCurve:
    def test_symmetric_root_is_fixed_point(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            p = random_params(rng)
            r = quad_positive_root(p)
            assert xa_from_xb(p, r) == pytest.approx(r, abs=1e-10 * (1 + r))

    def test_reported_off_diagonal_pairing(self, skew_params):
        assert xa_from_xb(skew_params, 0.772) == pytest.approx(5.237, abs=1e-2)

    def test_numerator_root(self, fig1_params):
        p = fig1_params
        x_b = p.lambda_l * p.delta / (p.beta * (p.lambda_l + p.lambda_s))
        assert xa_from_xb(p, x_b) == pytest.approx(0.0, abs=1e-14)


class TestQuadPositiveRoot:
    def test_fig1_value(self, fig1_params):
        assert quad_positive_root(fig1_params) == pytest.approx(1 / 3, abs=1e-14)

    def test_skew_value(self, skew_params):
        assert quad_positive_root(skew_params) == pytest.approx(2.248, abs=1e-3)

    def test_is_polynomial_root(self, skew_params):
        p = skew_params
        r = quad_positive_root(p)
        value = 2 * p.gamma * p.delta * r**2 + 2 * p.beta * (p.lambda_l + p.lambda_s) * r - p.lambda_l * p.delta
        scale = 2 * p.gamma * p.delta * r**2 + 2 * p.beta * (p.lambda_l + p.lambda_s) * r + p.lambda_l * p.delta
        assert abs(value) < 1e-9 * scale


class TestQuarticCoeffs:
    def test_leading_and_constant_factorisations(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            p = random_params(rng)
            a0, _, _, _, a4 = quartic_coeffs(p)
            total = p.lambda_l + p.lambda_s
            assert a0 == pytest.approx(p.beta**2 * p.lambda_l * total**3, rel=1e-12)
            assert a4 == pytest.approx(2 * p.gamma**2 * p.delta**2 * p.beta * total, rel=1e-12)
            assert a4 > 0

    def test_exact_constant_term_identity(self):
        # same factorisation, exact: a0 = beta^2 lambda_l (lambda_l + lambda_s)^3
        p = SwarmParams(
            beta=Fraction(7, 3),
            gamma=Fraction(5, 2),
            lambda_l=Fraction(11, 4),
            lambda_s=Fraction(2, 5),
            delta=Fraction(3, 2),
        )
        a0 = quartic_coeffs(p)[0]
        total = p.lambda_l + p.lambda_s
        assert a0 == p.beta**2 * p.lambda_l * total**3

    def test_fig1_leading_value(self, fig1_params):
        assert quartic_coeffs(fig1_params)[4] == pytest.approx(720.0, abs=1e-9)


class TestDiscriminantBounds:
    def test_reported_bounds(self):
        d = DiscriminantParams(beta=2.0, gamma=3.0, eta=1.1, xi=1.1)
        lam0, lam1 = discriminant_lambda_bounds(d)
        assert lam0 == pytest.approx(-0.759, abs=1e-2)
        assert lam1 == pytest.approx(39.121, abs=1e-2)

    def test_ordering(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            d = DiscriminantParams(
                beta=rng.uniform(0.1, 5),
                gamma=rng.uniform(0.1, 5),
                eta=1 + rng.uniform(0, 3),
                xi=1 + rng.uniform(0, 3),
            )
            lam0, lam1 = discriminant_lambda_bounds(d)
            assert lam0 < lam1

    def test_out_of_regime_warns(self):
        with pytest.warns(OutOfRegimeWarning):
            DiscriminantParams(beta=1.0, gamma=2.0, eta=0.5, xi=1.2)

    def test_from_params_roundtrip(self, skew_params):
        d = DiscriminantParams.from_params(skew_params)
        assert d.eta == pytest.approx(1.1)
        assert d.xi == pytest.approx(1.1)
        p2 = d.swarm_params(skew_params.lambda_s)
        assert p2.lambda_l == pytest.approx(skew_params.lambda_l)
        assert p2.delta == pytest.approx(skew_params.delta)


def test_midpoint_discriminant_identity_exact():
    # the raw discriminant, divided by its positive cofactor, hits the
    # closed-form midpoint value exactly (verified in rational arithmetic)
    rng = np.random.default_rng(97)
    for _ in range(25):
        beta = Fraction(int(rng.integers(1, 60)), int(rng.integers(1, 12)))
        gamma = beta + Fraction(int(rng.integers(0, 60)), int(rng.integers(1, 12)))
        eta = 1 + Fraction(int(rng.integers(0, 30)), 10)
        xi = 1 + Fraction(int(rng.integers(0, 30)), 10)
        lam = midpoint_seeder_rate(beta, gamma, eta, xi)
        p = SwarmParams(
            beta=beta, gamma=gamma, lambda_l=eta * xi * lam, lambda_s=lam, delta=xi * lam
        )
        delta_exact = quartic_invariants(*quartic_coeffs(p)).Delta
        quad_value = delta_exact / discriminant_sign_cofactor(beta, gamma, eta, xi, lam)
        assert quad_value == midpoint_quadratic_value(beta, gamma, eta, xi)


def test_difference_rate_factorisation(fig1_params):
    # numerator of d(x_a - x_b)/dt = -2 * quadratic * quartic against the
    # eliminated-denominator; checked pointwise in x_b
    rng = np.random.default_rng(53)
    params = [fig1_params] + [random_params(rng) for _ in range(8)]
    rarest = ContinuousRarest()
    for p in params:
        field = two_segment_field(p)
        a0, a1, a2, a3, a4 = quartic_coeffs(p)
        total = p.lambda_l + p.lambda_s
        checked = 0
        while checked < 100:
            x_b = rng.uniform(0.01, 3.0)
            x_a = xa_from_xb(p, x_b)
            den_balance = p.beta * (x_a + x_b) - p.delta
            if abs(den_balance) < 1e-4 * (p.beta * (x_a + x_b) + p.delta):
                continue
            if abs(x_a + x_b) < 1e-6:
                continue
            x_l, x_s = xl_xs_from_xab(p, x_a, x_b)
            u = rarest.value(x_a, x_b)
            rates = field(np.array([x_l, x_a, x_b, x_s]), u)
            lhs = (rates[1] - rates[2]) * factorization_denominator(p, x_b)
            quad = 2 * p.gamma * p.delta * x_b**2 + 2 * p.beta * total * x_b - p.lambda_l * p.delta
            quart = a0 + a1 * x_b + a2 * x_b**2 + a3 * x_b**3 + a4 * x_b**4
            rhs = -2.0 * quad * quart
            assert abs(lhs - rhs) <= 1e-8 * max(abs(lhs), abs(rhs), 1e-9)
            checked += 1


class TestContinuousControlEquilibria:
    def test_skew_off_diagonal_pair(self, skew_params):
        eqs = continuous_control_equilibria(skew_params)
        pairs = sorted((s.x_a, s.x_b) for s in eqs.off_diagonal)
        assert len(pairs) == 2
        assert pairs[0][0] == pytest.approx(0.772, abs=1e-2)
        assert pairs[0][1] == pytest.approx(5.237, abs=1e-2)
        assert pairs[1][0] == pytest.approx(5.237, abs=1e-2)
        assert pairs[1][1] == pytest.approx(0.772, abs=1e-2)
        assert eqs.classification == "real-roots-exist"

    def test_members_are_verified_stationary_points(self, skew_params):
        eqs = continuous_control_equilibria(skew_params)
        for s in (eqs.on_diagonal, *eqs.off_diagonal):
            assert rarest_first_residual(skew_params, s) < 1e-8

    def test_fig1_has_no_off_diagonal(self, fig1_params):
        eqs = continuous_control_equilibria(fig1_params)
        assert eqs.off_diagonal == ()
        assert eqs.classification == "no-real-roots"
        half = half_control_equilibrium(fig1_params)
        assert eqs.on_diagonal.x_a == pytest.approx(half.x_a, abs=1e-12)
        assert eqs.on_diagonal.x_l == pytest.approx(half.x_l, abs=1e-12)

    def test_off_diagonal_members_pair_up(self, skew_params):
        eqs = continuous_control_equilibria(skew_params)
        a, b = eqs.off_diagonal
        assert a.x_a == pytest.approx(b.x_b, rel=1e-8)
        assert a.x_b == pytest.approx(b.x_a, rel=1e-8)

    def test_window_controls_off_diagonal_existence(self):
        # inside the no-real-root window the symmetric point is unique;
        # outside, the skew regime grows a pair of off-diagonal points
        d = DiscriminantParams(beta=2.0, gamma=3.0, eta=1.1, xi=1.1)
        lam0, lam1 = discriminant_lambda_bounds(d)
        inside = continuous_control_equilibria(d.swarm_params(0.5 * lam1))
        outside = continuous_control_equilibria(d.swarm_params(1.05 * lam1))
        assert inside.off_diagonal == ()
        assert len(outside.off_diagonal) == 2

    def test_report_payload(self, skew_params):
        report = continuous_control_equilibria(skew_params).to_report(skew_params)
        assert report["classification"] == "real-roots-exist"
        assert len(report["off_diagonal"]) == 2
        assert report["lambda_bounds"]["lambda1"] == pytest.approx(39.121, abs=1e-2)
        assert report["on_diagonal"]["sojourn"] > 0


class TestLittlesSojourn:
    def test_zero_state(self, fig1_params):
        from swarmdyn import SwarmState

        assert littles_sojourn(SwarmState(0, 0, 0, 0), 4.0) == 0.0

    def test_linearity(self, fig1_params):
        from swarmdyn import SwarmState

        s1 = SwarmState(1.0, 2.0, 3.0, 4.0)
        s2 = SwarmState(2.0, 4.0, 6.0, 4.0)
        assert littles_sojourn(s2, 4.0) == pytest.approx(2 * littles_sojourn(s1, 4.0))

    def test_off_diagonal_sojourn_exceeds_symmetric(self, skew_params):
        eqs = continuous_control_equilibria(skew_params)
        on = eqs.on_diagonal
        off = eqs.off_diagonal[0]
        assert on.x_a + on.x_b == pytest.approx(4.496, abs=2e-3)
        assert off.x_a + off.x_b == pytest.approx(6.009, abs=2e-3)
        # with the shared x_l the longer waiting mass means a longer sojourn
        lam = skew_params.lambda_l
        assert (on.x_l + off.x_a + off.x_b) / lam > littles_sojourn(on, lam)

    def test_requires_positive_rate(self, fig1_params):
        from swarmdyn import SwarmState

        with pytest.raises(ValueError):
            littles_sojourn(SwarmState(1, 1, 1, 1), 0.0)


def test_solver_roots_match_quartic_for_skew(skew_params):
    roots = solve_quartic(*quartic_coeffs(skew_params))
    positive = [r for r in roots if r > 0]
    assert positive == pytest.approx([0.772, 5.237], abs=1e-2)
