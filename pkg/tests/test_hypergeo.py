import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dkradial.hypergeo import (
    Hyp2F1DegenerateError,
    Hyp2F1DomainError,
    Hyp2F1Params,
    gauss_2f1,
    gauss_2f1_derivative,
)


def hyp2f1_exact(a: Fraction, b: Fraction, c: Fraction, x: Fraction) -> Fraction:
    """Rational-arithmetic oracle for terminating series."""
    assert a <= 0 and a.denominator == 1
    total = Fraction(1)
    term = Fraction(1)
    for k in range(-int(a)):
        term *= (a + k) * (b + k) * x / ((c + k) * (k + 1))
        total += term
    return total


def brute_series(a, b, c, x, terms=4000):
    t, s = 1.0, 1.0
    for k in range(terms):
        t *= (a + k) * (b + k) * x / ((c + k) * (k + 1))
        s += t
    return s


class TestValues:
    def test_at_zero_is_one(self):
        assert gauss_2f1(Hyp2F1Params(0.3, -2.7, 1.9), 0.0) == 1.0

    def test_terminating_polynomial(self):
        # F(-1, 3; 3/2; x) = 1 - 2x
        assert gauss_2f1(Hyp2F1Params(-1, 3, 1.5), 0.25) == pytest.approx(0.5, abs=1e-15)

    def test_log_identity(self):
        # F(1, 1; 2; x) = -ln(1-x)/x
        v = gauss_2f1(Hyp2F1Params(1, 1, 2), 0.5)
        assert v == pytest.approx(-math.log(0.5) / 0.5, rel=1e-12)

    def test_log_identity_beyond_half(self):
        for x in (0.55, 0.7, 0.85, 0.95):
            v = gauss_2f1(Hyp2F1Params(1.0, 0.75, 2.25), x)
            assert v == pytest.approx(brute_series(1.0, 0.75, 2.25, x, 40000), rel=1e-11)

    def test_binomial_identity(self):
        # F(a, b; b; x) = (1-x)^-a
        for x in (0.12, 0.48, 0.63):
            v = gauss_2f1(Hyp2F1Params(0.7, 2.3, 2.3), x)
            assert v == pytest.approx((1 - x) ** -0.7, rel=1e-12)


class TestDerivatives:
    def test_first_coefficient_at_zero(self):
        p = Hyp2F1Params(0.4, -1.3, 2.2)
        assert gauss_2f1_derivative(p, 0.0, 1) == pytest.approx(0.4 * -1.3 / 2.2, rel=1e-15)

    def test_terminating_slope(self):
        assert gauss_2f1_derivative(Hyp2F1Params(-1, 3, 1.5), 0.7, 1) == pytest.approx(-2.0, abs=1e-14)

    def test_log_identity_derivative(self):
        v = gauss_2f1_derivative(Hyp2F1Params(1, 1, 2), 0.5, 1)
        x = 0.5
        exact = 1 / ((1 - x) * x) + math.log(1 - x) / x**2
        assert v == pytest.approx(exact, rel=1e-11)

    def test_derivative_beyond_termination_is_zero(self):
        assert gauss_2f1_derivative(Hyp2F1Params(-1, 3, 1.5), 0.3, 2) == 0.0

    def test_order_validation(self):
        with pytest.raises(ValueError):
            gauss_2f1_derivative(Hyp2F1Params(1, 1, 2), 0.3, 4)


class TestErrors:
    def test_domain(self):
        for x in (-0.1, 1.0, 1.5):
            with pytest.raises(Hyp2F1DomainError):
                gauss_2f1(Hyp2F1Params(0.3, 0.4, 1.1), x)

    def test_gamma_pole_rejected(self):
        with pytest.raises(ValueError):
            Hyp2F1Params(1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            Hyp2F1Params(1.0, 1.0, -2.0)

    def test_degenerate_connection(self):
        # c-a-b integer and x > 0.9: connection formula near-singular
        with pytest.raises(Hyp2F1DegenerateError):
            gauss_2f1(Hyp2F1Params(0.25, 0.75, 2.0), 0.95)

    def test_degenerate_falls_back_below_090(self):
        # same parameters are fine at x <= 0.9 via the direct series
        v = gauss_2f1(Hyp2F1Params(0.25, 0.75, 2.0), 0.8)
        assert v == pytest.approx(brute_series(0.25, 0.75, 2.0, 0.8, 20000), rel=1e-11)


class TestRationalOracle:
    @pytest.mark.parametrize(
        "a,b,c",
        [(-3, 5, Fraction(3, 2)), (-7, Fraction(9, 2), Fraction(1, 2)),
         (-12, 14, Fraction(5, 2)), (-1, 3, Fraction(3, 2)), (-20, 22, Fraction(3, 2))],
    )
    def test_matches_exact_summation(self, a, b, c):
        import random

        rng = random.Random(20240 + int(a))
        for _ in range(20):
            xr = Fraction(rng.randrange(0, 999), 1000)
            exact = hyp2f1_exact(Fraction(a), Fraction(b), Fraction(c), xr)
            got = gauss_2f1(Hyp2F1Params(float(a), float(b), float(c)), float(xr))
            # ulp scale of the summation: sum of absolute term magnitudes
            term, scale = Fraction(1), 1.0
            for k in range(-int(a)):
                term *= (a + k) * (b + k) * xr / ((c + k) * (k + 1))
                scale += abs(float(term))
            assert abs(got - float(exact)) <= 1e-14 * scale


class TestOdeResidual:
    def residual(self, p: Hyp2F1Params, x: float) -> float:
        f = gauss_2f1(p, x)
        f1 = gauss_2f1_derivative(p, x, 1)
        f2 = gauss_2f1_derivative(p, x, 2)
        terms = [
            x * (1 - x) * f2,
            (p.gamma - (p.alpha + p.beta + 1) * x) * f1,
            -p.alpha * p.beta * f,
        ]
        scale = max(abs(t) for t in terms) or 1.0
        return abs(sum(terms)) / scale

    def test_gauss_ode(self):
        import random

        rng = random.Random(7)
        for _ in range(20):
            a = rng.uniform(-3, 3)
            b = rng.uniform(-3, 3)
            c = rng.uniform(0.4, 4)
            if abs(c - round(c)) < 0.05 and c < 1:
                c += 0.21
            p = Hyp2F1Params(a, b, c)
            for x in [0.02 + 0.93 * k / 49 for k in range(50)]:
                s = c - a - b
                if x > 0.9 and abs(s - round(s)) <= 1e-8:
                    continue
                assert self.residual(p, x) <= 1e-9


class TestConnectionConsistency:
    def test_both_sides_of_split(self):
        p = Hyp2F1Params(0.37, 1.21, 2.63)
        for x in (0.45, 0.55):
            ref = brute_series(p.alpha, p.beta, p.gamma, x, 20000)
            assert gauss_2f1(p, x) == pytest.approx(ref, rel=1e-10)


@given(
    st.integers(min_value=0, max_value=15),
    st.integers(min_value=1, max_value=20),
    st.sampled_from([0.5, 1.5, 2.5]),
    st.integers(min_value=0, max_value=970),
)
@settings(max_examples=60, deadline=None)
def test_terminating_is_polynomial(n, b, c, k):
    """Degree--n truth: the value equals the Horner sum of n+1 exact terms."""
    xr = Fraction(k, 1000)
    p = Hyp2F1Params(float(-n), float(b), c)
    assert p.terminating and p.degree == n
    exact = hyp2f1_exact(Fraction(-n), Fraction(b), Fraction(c), xr)
    term, scale = Fraction(1), 1.0
    for i in range(n):
        term *= (-n + i) * (b + i) * xr / ((Fraction(c) + i) * (i + 1))
        scale += abs(float(term))
    assert abs(gauss_2f1(p, float(xr)) - float(exact)) <= 1e-12 * scale
