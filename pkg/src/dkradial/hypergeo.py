"""Gauss hypergeometric function 2F1 on the real interval [0, 1).

Terminating series (a negative-integer upper parameter) are summed exactly by
Horner's rule.  Non-terminating series use the defining power series for
x <= 1/2 and the x -> 1-x connection formula beyond, which keeps the number of
summed terms small on both halves.  Derivatives come from the contiguous
relation d/dx F(a,b;c;x) = (ab/c) F(a+1,b+1;c+1;x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "Hyp2F1Params",
    "Hyp2F1DomainError",
    "Hyp2F1DegenerateError",
    "Hyp2F1ConvergenceError",
    "gauss_2f1",
    "gauss_2f1_derivative",
]

# Series control: stop once |term| < SERIES_RTOL*|sum| three times in a row.
SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100_000
# Connection formula is rejected when c-a-b is this close to an integer and
# the direct series would need too many terms (x > 0.9).
INTEGER_GAP = 1e-8


class Hyp2F1DomainError(ValueError):
    """Argument x outside [0, 1)."""


class Hyp2F1DegenerateError(ValueError):
    """c-a-b too close to an integer for the connection formula."""


class Hyp2F1ConvergenceError(ArithmeticError):
    """Series failed its tail bound within the iteration cap."""


def _nonpositive_int(v: float) -> bool:
    return v <= 0 and v == round(v)


@dataclass(frozen=True)
class Hyp2F1Params:
    """Parameter triple (alpha, beta, gamma) of 2F1.

    ``terminating`` is derived: true when alpha or beta is a non-positive
    integer, in which case the series is a polynomial of degree
    -alpha (or -beta, whichever terminates first).
    """

    alpha: float
    beta: float
    gamma: float
    terminating: bool = field(init=False)

    def __post_init__(self):
        if _nonpositive_int(self.gamma):
            raise ValueError(f"gamma={self.gamma} must not be a non-positive integer")
        object.__setattr__(
            self,
            "terminating",
            _nonpositive_int(self.alpha) or _nonpositive_int(self.beta),
        )

    @property
    def degree(self) -> int | None:
        """Polynomial degree of a terminating series, else None."""
        if not self.terminating:
            return None
        cands = []
        if _nonpositive_int(self.alpha):
            cands.append(int(-self.alpha))
        if _nonpositive_int(self.beta):
            cands.append(int(-self.beta))
        return min(cands)

    def raised(self, k: int) -> "Hyp2F1Params":
        """Parameters of the k-th contiguous derivative."""
        return Hyp2F1Params(self.alpha + k, self.beta + k, self.gamma + k)


def _poch(v: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= v + i
    return out


def _rgamma(v: float) -> float:
    """1/Gamma(v); zero at the poles of Gamma."""
    try:
        return 1.0 / math.gamma(v)
    except ValueError:
        return 0.0


def _horner_terminating(a: float, b: float, c: float, deg: int, x: float) -> float:
    coeffs = [1.0]
    t = 1.0
    for k in range(deg):
        t *= (a + k) * (b + k) / ((c + k) * (k + 1))
        coeffs.append(t)
    s = coeffs[deg]
    for k in range(deg - 1, -1, -1):
        s = s * x + coeffs[k]
    return s


def _series(a: float, b: float, c: float, x: float) -> float:
    term = 1.0
    s = 1.0
    small = 0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) * x / ((c + k) * (k + 1))
        s += term
        if abs(term) < SERIES_RTOL * abs(s):
            small += 1
            if small >= 3:
                return s
        else:
            small = 0
    raise Hyp2F1ConvergenceError(
        f"2F1 series did not meet tail bound for a={a}, b={b}, c={c}, x={x}"
    )


def _connection(a: float, b: float, c: float, x: float) -> float:
    # F(a,b;c;x) via the two solutions at x=1; valid off integer c-a-b.
    s = c - a - b
    y = 1.0 - x
    coef1 = math.gamma(c) * math.gamma(s) * _rgamma(c - a) * _rgamma(c - b)
    coef2 = math.gamma(c) * math.gamma(-s) * _rgamma(a) * _rgamma(b)
    f1 = _series(a, b, 1.0 - s, y) if coef1 != 0.0 else 0.0
    f2 = _series(c - a, c - b, 1.0 + s, y) if coef2 != 0.0 else 0.0
    return coef1 * f1 + coef2 * y**s * f2


def gauss_2f1(params: Hyp2F1Params, x: float) -> float:
    """Evaluate 2F1(alpha, beta; gamma; x) for x in [0, 1)."""
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise Hyp2F1DomainError(f"x={x} outside [0, 1)")
    a, b, c = params.alpha, params.beta, params.gamma
    if params.terminating:
        return _horner_terminating(a, b, c, params.degree, x)
    if x == 0.0:
        return 1.0
    if x <= 0.5:
        return _series(a, b, c, x)
    s = c - a - b
    near_integer = abs(s - round(s)) <= INTEGER_GAP
    if near_integer:
        if x > 0.9:
            raise Hyp2F1DegenerateError(
                f"c-a-b={s} within {INTEGER_GAP} of an integer: "
                f"connection formula near-singular at x={x}"
            )
        # Slowly convergent but safe fallback on (0.5, 0.9].
        return _series(a, b, c, x)
    return _connection(a, b, c, x)


def gauss_2f1_derivative(params: Hyp2F1Params, x: float, order: int) -> float:
    """k-th derivative of 2F1 at x, order in {1, 2, 3}.

    Uses the contiguous relation recursively; accuracy inherits from
    gauss_2f1.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order={order} not in 1..3")
    return _derivative_any_order(params, x, order)


def _derivative_any_order(params: Hyp2F1Params, x: float, order: int) -> float:
    # Internal: no cap on the order (the amplitude algebra needs up to 5).
    a, b, c = params.alpha, params.beta, params.gamma
    scale = _poch(a, order) * _poch(b, order) / _poch(c, order)
    if scale == 0.0:
        return 0.0
    return scale * gauss_2f1(params.raised(order), x)
