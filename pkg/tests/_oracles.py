"""Independent oracle formulas used by the tests.

These were derived once by exact symbolic factorisation of the model's
stationarity algebra and are deliberately kept separate from the library
so the tests cross-check two routes to the same quantities.
"""

from fractions import Fraction


def factorization_denominator(p, x_b: float) -> float:
    """Common denominator of d(x_a - x_b)/dt after the stationarity substitutions.

    Eliminating x_s, x_l and x_a turns the segment-difference rate into a
    rational function of x_b; against this (negative) denominator its
    numerator is exactly -2 * (symmetric quadratic) * (equilibrium quartic).
    """
    b, g, ll, ls, d = p.beta, p.gamma, p.lambda_l, p.lambda_s, p.delta
    total = ll + ls
    f1 = 2 * g * x_b**2 + ll
    f2 = b * total + 2 * d * g * x_b
    f3 = b * total**2 + d**2 * ll + 2 * d * g * total * x_b + 2 * d**2 * g * x_b**2
    return -d * f1 * f2 * f3


def discriminant_sign_cofactor(beta, gamma, eta, xi, lambda_s):
    """Positive cofactor linking the raw quartic discriminant to its
    sign-governing quadratic in the seeder arrival rate.

    Along the family lambda_l = eta * xi * lambda_s, delta = xi * lambda_s
    the discriminant factors as cofactor * quadratic(lambda_s); dividing by
    this cofactor exposes the quadratic whose midpoint value has the simple
    closed form (1/8)(eta xi + 1)^4 (gamma + 16 beta)(gamma + 2 beta)^2.
    Exact under Fraction arithmetic.
    """
    s = eta * xi + 1
    f1 = beta**2 * s**2 + 2 * eta * gamma * xi**3 * lambda_s
    f2 = (
        beta**2 * s**4
        - 6 * beta * eta * xi**3 * s**2 * lambda_s
        + eta**2 * xi**6 * lambda_s**2
    )
    if isinstance(s, Fraction):
        sixty_four = Fraction(64)
    else:
        sixty_four = 64.0
    return eta * gamma**6 * lambda_s**19 * xi**3 * f1**2 * f2**2 / sixty_four


def midpoint_seeder_rate(beta, gamma, eta, xi):
    """Seeder arrival rate halfway between the two real-root onset bounds."""
    s = eta * xi + 1
    return s**2 * (gamma + 10 * beta) / (4 * xi**3 * eta)


def midpoint_quadratic_value(beta, gamma, eta, xi):
    """Closed-form value of the sign quadratic at the midpoint rate."""
    s = eta * xi + 1
    if isinstance(s, Fraction):
        eighth = Fraction(1, 8)
    else:
        eighth = 0.125
    return eighth * s**4 * (gamma + 16 * beta) * (gamma + 2 * beta) ** 2
