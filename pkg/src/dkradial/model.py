"""Radial ODE systems and differential operators on the spherical 3-space.

Everything is kept as evaluable closed-form coefficient data so that the
verification and oracle modules can sample operators on arbitrary grids.
Units: curvature radius 1, radial coordinate r in (0, pi), natural units for
the mass and energy.

Branch conventions: the constraint branch lambda = -1 and the parity branch
delta = -1 are realized by the mass-sign substitution m -> -m; no separate
coefficient tables exist for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = [
    "QuantumNumbers",
    "ModeParams",
    "RationalCoefficient",
    "LinearDifferentialOperator",
    "FirstOrderSystem",
    "system_j0",
    "system_j",
    "operator_K4",
    "operator_M4",
    "factor_pair_K",
    "factor_pair_M",
    "indicial_exponents",
    "indicial_matrix",
]


@dataclass(frozen=True)
class QuantumNumbers:
    """Total angular momentum j and radial index n."""

    j: int
    n: int

    def __post_init__(self):
        if self.j < 0 or self.n < 0:
            raise ValueError(f"j={self.j}, n={self.n} must be non-negative")

    @property
    def a_sq(self) -> int:
        """j(j+1), kept exact wherever it enters spectra and operators."""
        return self.j * (self.j + 1)

    @property
    def a(self) -> float:
        return math.sqrt(self.a_sq)


@dataclass(frozen=True)
class ModeParams:
    """Mass, energy and the two discrete branch choices.

    eps and m are the single source of truth; p_sq is derived.  The
    effective mass (lambda_sign * m) realizes the lambda = -1 branch.
    """

    m: float
    eps: float
    lambda_sign: int = +1
    delta_sign: int = +1

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mass must be non-negative")
        if self.lambda_sign not in (-1, +1) or self.delta_sign not in (-1, +1):
            raise ValueError("lambda_sign and delta_sign must be +1 or -1")

    @property
    def p_sq(self) -> float:
        return self.eps**2 - self.m**2

    @property
    def eps_sign(self) -> int:
        return -1 if self.eps < 0 else +1

    @property
    def m_eff(self) -> float:
        return self.lambda_sign * self.m

    @classmethod
    def from_p_sq(cls, m, p_sq, lambda_sign=+1, delta_sign=+1, eps_sign=+1) -> "ModeParams":
        eps = eps_sign * math.sqrt(float(p_sq) + float(m) ** 2)
        return cls(m=float(m), eps=eps, lambda_sign=lambda_sign, delta_sign=delta_sign)


class RationalCoefficient:
    """Coefficient function: polynomial plus pole sums at x=0 and x=1.

        sum_k poly[k] x^k + sum_k poles0[k-1]/x^k + sum_k poles1[k-1]/(1-x)^k

    Closed under differentiation; finite anywhere in (0,1).
    """

    __slots__ = ("poly", "poles0", "poles1")

    def __init__(self, poly=(), poles0=(), poles1=()):
        self.poly = tuple(float(c) for c in poly)
        self.poles0 = tuple(float(c) for c in poles0)
        self.poles1 = tuple(float(c) for c in poles1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k in range(len(self.poly) - 1, -1, -1):
            out = out * x + self.poly[k]
        for k, c in enumerate(self.poles0, start=1):
            if c:
                out = out + c / x**k
        for k, c in enumerate(self.poles1, start=1):
            if c:
                out = out + c / (1.0 - x) ** k
        return out

    def derivative(self) -> "RationalCoefficient":
        # d/dx c/x^k = -k c/x^(k+1); d/dx c/(1-x)^k = +k c/(1-x)^(k+1)
        poly = tuple((k + 1) * c for k, c in enumerate(self.poly[1:]))
        n0 = len(self.poles0)
        poles0 = [0.0] * (n0 + 1 if n0 else 0)
        for k, c in enumerate(self.poles0, start=1):
            poles0[k] = -k * c
        n1 = len(self.poles1)
        poles1 = [0.0] * (n1 + 1 if n1 else 0)
        for k, c in enumerate(self.poles1, start=1):
            poles1[k] = k * c
        return RationalCoefficient(poly, poles0, poles1)

    def perturbed(self, factor: float) -> "RationalCoefficient":
        return RationalCoefficient(
            tuple(c * factor for c in self.poly),
            tuple(c * factor for c in self.poles0),
            tuple(c * factor for c in self.poles1),
        )

    def leading_pole(self, at: int) -> tuple[int, float]:
        """(order, coefficient) of the strongest pole at x=0 or x=1."""
        poles = self.poles0 if at == 0 else self.poles1
        for k in range(len(poles), 0, -1):
            if poles[k - 1]:
                return k, poles[k - 1]
        return 0, 0.0


@dataclass(frozen=True)
class LinearDifferentialOperator:
    """sum_k coeffs[k](x) d^k/dx^k with closed-form coefficients."""

    order: int
    coeffs: tuple[RationalCoefficient, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("need order+1 coefficient functions")

    def apply(self, x, derivs) -> np.ndarray:
        """Apply to a function given as derivative rows derivs[k] = y^(k)(x)."""
        x = np.asarray(x, dtype=float)
        if len(derivs) < self.order + 1:
            raise ValueError("not enough derivatives supplied")
        out = np.zeros_like(x)
        for k in range(self.order + 1):
            out = out + self.coeffs[k](x) * np.asarray(derivs[k], dtype=float)
        return out

    def term_magnitudes(self, x, derivs) -> np.ndarray:
        """|c_k y^(k)| rows, for term-scaled relative residuals."""
        x = np.asarray(x, dtype=float)
        return np.array(
            [np.abs(self.coeffs[k](x) * np.asarray(derivs[k], dtype=float)) for k in range(self.order + 1)]
        )

    def with_perturbed_coeff(self, k: int, factor: float) -> "LinearDifferentialOperator":
        coeffs = list(self.coeffs)
        coeffs[k] = coeffs[k].perturbed(factor)
        return LinearDifferentialOperator(self.order, tuple(coeffs))


@dataclass(frozen=True)
class FirstOrderSystem:
    """dY/dr = A(r) Y with simple poles at r=0 and r=pi at worst."""

    dim: int
    matrix: Callable[[float], np.ndarray]
    singular_points: tuple[float, float] = (0.0, math.pi)
    state: tuple[str, ...] = ()


def system_j0(params: ModeParams) -> FirstOrderSystem:
    """The j=0 pair in (M, N).

    For lambda=+1:  M' = -M/tan r - (eps+m) N,  N' = N/tan r + (eps-m) M.
    lambda=-1 is the same with m -> -m.
    """
    eps, m = params.eps, params.m_eff

    def matrix(r: float) -> np.ndarray:
        ct = 1.0 / math.tan(r)
        return np.array([[-ct, -(eps + m)], [eps - m, ct]])

    return FirstOrderSystem(dim=2, matrix=matrix, state=("M", "N"))


def system_j(params: ModeParams, qn: QuantumNumbers) -> FirstOrderSystem:
    """The coupled j >= 1 system in state order (K, L, M, N)."""
    if qn.j < 1:
        raise ValueError("system_j requires j >= 1; use system_j0")
    eps, m = params.eps, params.m_eff
    a = qn.a

    def matrix(r: float) -> np.ndarray:
        s = 1.0 / math.sin(r)
        ct = 1.0 / math.tan(r)
        return np.array(
            [
                [0.0, -(eps + m), -a * s, 0.0],
                [eps - m, 0.0, 0.0, a * s],
                [-a * s, 0.0, -ct, -(eps + m)],
                [0.0, a * s, eps - m, ct],
            ]
        )

    return FirstOrderSystem(dim=4, matrix=matrix, state=("K", "L", "M", "N"))


def operator_K4(p_sq: float, a_sq: float) -> LinearDifferentialOperator:
    """Fourth-order operator annihilating K(x), x = cos^2 r."""
    p2, a2 = float(p_sq), float(a_sq)
    c4 = RationalCoefficient(poly=(0.0, 0.0, 1.0))
    c3 = RationalCoefficient(poly=(5.0, 7.0), poles1=(-5.0,))
    c2 = RationalCoefficient(
        poly=(10.0 - p2 / 2.0,),
        poles1=((p2 + a2 - 28.0) / 2.0, (15.0 - 2.0 * a2) / 4.0),
    )
    c1 = RationalCoefficient(
        poles0=(0.25,),
        poles1=((3.0 * p2 - 7.0) / 4.0, -(3.0 * p2 + a2 - 9.0) / 4.0, a2 / 4.0),
    )
    c0 = RationalCoefficient(
        poles0=((p2 - a2) / 8.0,),
        poles1=(
            (p2 - a2) / 8.0,
            (p2**2 + 2.0 * p2 - 2.0 * a2) / 16.0,
            -a2 * (p2 - 1.0) / 8.0,
            a2 * (a2 - 2.0) / 16.0,
        ),
    )
    return LinearDifferentialOperator(4, (c0, c1, c2, c3, c4))


def operator_M4(p_sq: float, a_sq: float) -> LinearDifferentialOperator:
    """Companion fourth-order operator annihilating M(x); differs from the
    K operator by -1/4 in the (1-x)^-1 part of c1 and by the -1 and -3
    shifts in c0."""
    p2, a2 = float(p_sq), float(a_sq)
    base = operator_K4(p_sq, a_sq)
    c1 = RationalCoefficient(
        poles0=(0.25,),
        poles1=((3.0 * p2 - 6.0) / 4.0, -(3.0 * p2 + a2 - 9.0) / 4.0, a2 / 4.0),
    )
    c0 = RationalCoefficient(
        poles0=((p2 - a2 - 1.0) / 8.0,),
        poles1=(
            (p2 - a2 - 1.0) / 8.0,
            (p2**2 + 2.0 * p2 - 2.0 * a2 - 3.0) / 16.0,
            -a2 * (p2 - 1.0) / 8.0,
            a2 * (a2 - 2.0) / 16.0,
        ),
    )
    return LinearDifferentialOperator(4, (c0, c1, base.coeffs[2], base.coeffs[3], base.coeffs[4]))


def _outer_operator(shift: float, a_sq: float, p_sq: float) -> LinearDifferentialOperator:
    p2, a2 = float(p_sq), float(a_sq)
    c2 = RationalCoefficient(poly=(1.0,))
    c1 = RationalCoefficient(poles0=(1.5,), poles1=(-3.5,))
    c0 = RationalCoefficient(
        poles0=((p2 - a2 - shift) / 4.0,),
        poles1=((p2 - a2 - shift) / 4.0, -(a2 - 6.0) / 4.0),
    )
    return LinearDifferentialOperator(2, (c0, c1, c2))


def _inner_operator(shift: float, a_sq: float, p_sq: float) -> LinearDifferentialOperator:
    p2, a2 = float(p_sq), float(a_sq)
    c2 = RationalCoefficient(poly=(1.0,))
    c1 = RationalCoefficient(poles0=(0.5,), poles1=(-1.5,))
    c0 = RationalCoefficient(
        poles0=((p2 - a2 - shift) / 4.0,),
        poles1=((p2 - a2 - shift) / 4.0, -a2 / 4.0),
    )
    return LinearDifferentialOperator(2, (c0, c1, c2))


def factor_pair_K(p_sq: float, a_sq: float) -> tuple[LinearDifferentialOperator, LinearDifferentialOperator]:
    """(outer, inner) second-order factors of the K operator.

    Both factors are monic; the fourth-order operator equals x^2 times the
    composition outer(inner(.)) -- the x^2 restores its leading coefficient.
    """
    return _outer_operator(10.0, a_sq, p_sq), _inner_operator(0.0, a_sq, p_sq)


def factor_pair_M(p_sq: float, a_sq: float) -> tuple[LinearDifferentialOperator, LinearDifferentialOperator]:
    """(outer, inner) factors of the M operator; c0 numerators carry the
    -9 (outer) and -1 (inner) shifts."""
    return _outer_operator(9.0, a_sq, p_sq), _inner_operator(1.0, a_sq, p_sq)


def indicial_exponents(j: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Local exponents gamma of (K, M) ~ (1-x)^gamma at x=1, for j >= 1.

    Returns (all four exponents, bound-state subset), each sorted
    descending.  Only the positive pair can describe bound states.
    """
    if j < 1:
        raise ValueError("indicial exponents defined for j >= 1")
    all_four = (
        Fraction(j + 2, 2),
        Fraction(j, 2),
        Fraction(1 - j, 2),
        Fraction(-(j + 1), 2),
    )
    bound = (Fraction(j + 2, 2), Fraction(j, 2))
    return all_four, bound


def indicial_matrix(gamma: float, a_sq: float) -> np.ndarray:
    """2x2 algebraic system linking (K0, M0) in the (1-x)^gamma ansatz.

    Its determinant vanishes exactly at the four indicial exponents.
    """
    g, a2 = float(gamma), float(a_sq)
    u = 4.0 * g * g - 2.0 * g - a2
    a = math.sqrt(a2)
    return np.array([[u, -2.0 * a], [-2.0 * a, u - 2.0]])
