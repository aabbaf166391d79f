"""Exact quasi-polynomial wavefunctions and discrete spectra.

Four terminating-hypergeometric families cover j >= 1; the j=0 sector
reduces to a single second-order problem.  Spectra are kept as exact
rationals: the p^2 values are integers (families iii, iv), integers minus
one (families i, ii and j=0), or squares of half-odd integers for the
spin-1/2 comparison series.

Family (iii) caution: its p^2 formula (j+2n)^2 admits n=0, but the
corresponding level p^2 = j^2 carries no normalizable state -- the
terminating construction only exists from n=1 up (the degree of the
hypergeometric polynomial is n-1).  spectrum() still returns the n=0 entry,
flagged ``bound=False``, because the exact j-shift identities quantify over
it; wavefunction constructors reject it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from ._exprs import Expr, hyp_expr, HALF
from .model import ModeParams, QuantumNumbers

__all__ = [
    "Family",
    "SpectrumEntry",
    "OffSpectrumError",
    "EliminationSingularError",
    "RadialSolution",
    "spectrum",
    "family_levels",
    "wavefunction_j0",
    "wavefunction_family",
    "general_basis",
    "assemble_components",
    "degeneracy_map",
    "DegeneratePair",
    "j0_ratio",
]

SPECTRUM_RTOL = 1e-9


class Family(str, Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    F4 = "f4"
    J0 = "j0"
    DIRAC = "dirac"


class OffSpectrumError(ValueError):
    """Requested energy is not on the discrete spectrum."""


class EliminationSingularError(ZeroDivisionError):
    """eps + m = 0: the first-order elimination for (L, N) is singular."""


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot convert {v!r} to an exact rational")


@dataclass(frozen=True)
class SpectrumEntry:
    family: Family
    j_or_J: Fraction
    n: int
    p_sq: Fraction
    eps_sq: Fraction
    bound: bool = True
    degenerate_partner: tuple[Family, int, int] | None = None

    def eps(self, eps_sign: int = +1) -> float:
        return eps_sign * math.sqrt(float(self.eps_sq))

    @property
    def p(self) -> float:
        return math.sqrt(float(self.p_sq))


def _p_sq_formula(family: Family, j: Fraction, n: int) -> Fraction:
    if family is Family.F1:
        return Fraction(j + 2 + 2 * n) ** 2 - 1
    if family is Family.F2:
        return Fraction(j + 1 + 2 * n) ** 2 - 1
    if family is Family.F3:
        return Fraction(j + 2 * n) ** 2
    if family is Family.F4:
        return Fraction(j + 1 + 2 * n) ** 2
    if family is Family.J0:
        return Fraction(2 + n) ** 2 - 1
    if family is Family.DIRAC:
        return Fraction(n + j + 1) ** 2
    raise ValueError(f"unknown family {family}")


def _partner(family: Family, j: int, n: int) -> tuple[Family, int, int] | None:
    # Same-n, j-shifted twins: F1(j) <-> F2(j+1) and F4(j) <-> F3(j+1).
    if family is Family.F1:
        return (Family.F2, j + 1, n)
    if family is Family.F2:
        return (Family.F1, j - 1, n) if j >= 2 else None
    if family is Family.F4:
        return (Family.F3, j + 1, n)
    if family is Family.F3:
        return (Family.F4, j - 1, n) if j >= 2 else None
    return None


def spectrum(family: Family, j_or_J, n: int, m) -> SpectrumEntry:
    """Exact spectrum entry (p^2, eps^2) for one state label."""
    family = Family(family)
    if n < 0:
        raise ValueError("n must be non-negative")
    j = _as_fraction(j_or_J)
    if family in (Family.F1, Family.F2, Family.F3, Family.F4):
        if j.denominator != 1 or j < 1:
            raise ValueError(f"families i-iv need integer j >= 1, got {j}")
    elif family is Family.DIRAC:
        if j.denominator != 2 or j < Fraction(1, 2):
            raise ValueError(f"the comparison series needs half-odd J >= 1/2, got {j}")
    elif family is Family.J0:
        j = Fraction(0)
    p_sq = _p_sq_formula(family, j, n)
    eps_sq = p_sq + _as_fraction(m) ** 2
    bound = not (family is Family.F3 and n == 0)
    partner = None
    if family in (Family.F1, Family.F2, Family.F3, Family.F4):
        partner = _partner(family, int(j), n)
    return SpectrumEntry(
        family=family, j_or_J=j, n=n, p_sq=p_sq, eps_sq=eps_sq, bound=bound,
        degenerate_partner=partner,
    )


def family_levels(j: int, n_max: int, m, families=(Family.F1, Family.F2, Family.F3, Family.F4),
                  bound_only: bool = True) -> list[SpectrumEntry]:
    """All family entries with n <= n_max at fixed j, sorted by p^2."""
    out = []
    for fam in families:
        for n in range(n_max + 1):
            e = spectrum(fam, j, n, m)
            if bound_only and not e.bound:
                continue
            out.append(e)
    return sorted(out, key=lambda e: e.p_sq)


@dataclass
class RadialSolution:
    """Amplitudes sampled on an r-grid, with family/branch metadata.

    j=0 solutions carry only (M, N); the auxiliary pair is C = lam*M,
    D = lam*N.  Families i-iv carry the full (K, L, M, N).
    """

    family: Family | None
    qn: QuantumNumbers
    params: ModeParams
    grid: np.ndarray
    K: np.ndarray | None = None
    L: np.ndarray | None = None
    M: np.ndarray | None = None
    N: np.ndarray | None = None
    label: str = ""
    exprs: dict = field(default_factory=dict, repr=False)


def j0_ratio(eps: float, m: float, lambda_sign: int) -> float:
    """Amplitude ratio M0/N0 connecting the two j=0 functions.

    Branch-dependent: -(2/3)(eps + m) on the lambda=+1 pair and
    -(2/3)(eps - m) on the lambda=-1 pair (the mass-sign substitution).
    """
    return -(2.0 / 3.0) * (eps + lambda_sign * m)


def wavefunction_j0(n: int, params: ModeParams, grid) -> RadialSolution:
    """j=0 solution pair in x = (1-cos r)/2, N0 = 1.

    N = N0 sqrt(x(1-x)) F(-n-1, 3+n; 3/2; x)
    M = M0 x(1-x)      F(-n,   4+n; 5/2; x)
    """
    eps, m = params.eps, params.m
    target = m * m - 1.0 + (2 + n) ** 2
    if abs(eps * eps - target) > SPECTRUM_RTOL * max(1.0, abs(target)):
        raise OffSpectrumError(
            f"eps^2={eps*eps} is off the j=0 spectrum value {target} for n={n}"
        )
    ratio = j0_ratio(eps, m, params.lambda_sign)
    N_expr = hyp_expr(1.0, HALF, HALF, -n - 1, 3 + n, 1.5)
    M_expr = hyp_expr(ratio, 1, 1, -n, 4 + n, 2.5)
    grid = np.asarray(grid, dtype=float)
    return RadialSolution(
        family=Family.J0,
        qn=QuantumNumbers(0, n),
        params=params,
        grid=grid,
        M=M_expr.eval_r_half(grid),
        N=N_expr.eval_r_half(grid),
        label=f"j0 n={n}",
        exprs={"M": M_expr, "N": N_expr},
    )


# -- families i-iv ----------------------------------------------------------

def _family_direct_expr(family: Family, j: int, n: int) -> Expr:
    """The directly given amplitude: K for families i, ii; M for iii, iv.

    x = cos^2 r; x^{1/2} is the signed cos r so the amplitude is smooth
    across the equator.  Family iii uses polynomial degree n-1.
    """
    jf = Fraction(j, 2)
    if family is Family.F1:
        return hyp_expr(1.0, HALF, jf, -n, j + 2 + n, 1.5)
    if family is Family.F2:
        return hyp_expr(1.0, 0, jf, -n, j + 1 + n, 0.5)
    if family is Family.F3:
        k = n - 1
        return hyp_expr(1.0, HALF, jf, -k, j + 2 + k, 1.5)
    if family is Family.F4:
        return hyp_expr(1.0, 0, jf, -n, j + 1 + n, 0.5)
    raise ValueError(f"no direct amplitude for family {family}")


def _family_companion_expr(family: Family, j: int, n: int) -> Expr:
    """The lacking amplitude: M for families i, ii; K for iii, iv.

    Explicit two-hypergeometric combinations; each bracket vanishes at x=0
    where a 1/sqrt(x) prefactor is present.
    """
    a = math.sqrt(j * (j + 1))
    jf = Fraction(j, 2)
    if family is Family.F3:
        n = n - 1
    if family in (Family.F1, Family.F3):
        # bracket: 2n(x-1) F(1-n, j+n+2; 3/2; x) - (cx + 2n(x-1) + d) F(-n, j+n+2; 3/2; x)
        c, d = (j + 1.0, -1.0) if family is Family.F1 else (j + 2.0, -1.0)
        lead = hyp_expr(2.0 * n, 1, 0, 1 - n, j + n + 2, 1.5) - hyp_expr(2.0 * n, 0, 0, 1 - n, j + n + 2, 1.5)
        sub = (
            hyp_expr(c, 1, 0, -n, j + n + 2, 1.5)
            + hyp_expr(2.0 * n, 1, 0, -n, j + n + 2, 1.5)
            - hyp_expr(2.0 * n, 0, 0, -n, j + n + 2, 1.5)
            + hyp_expr(d, 0, 0, -n, j + n + 2, 1.5)
        )
        return (lead - sub).shift(0, jf).scale(1.0 / a)
    if family in (Family.F2, Family.F4):
        c = float(j) if family is Family.F2 else j + 1.0
        lead = hyp_expr(2.0 * n, 1, 0, 1 - n, j + n + 1, 0.5) - hyp_expr(2.0 * n, 0, 0, 1 - n, j + n + 1, 0.5)
        sub = (
            hyp_expr(c, 1, 0, -n, j + n + 1, 0.5)
            + hyp_expr(2.0 * n, 1, 0, -n, j + n + 1, 0.5)
            - hyp_expr(2.0 * n, 0, 0, -n, j + n + 1, 0.5)
        )
        return (lead - sub).shift(-HALF, jf).scale(1.0 / a)
    raise ValueError(f"no companion amplitude for family {family}")


def family_KM_exprs(family: Family, j: int, n: int) -> tuple[Expr, Expr]:
    """(K, M) expression pair for one terminating family state."""
    direct = _family_direct_expr(family, j, n)
    companion = _family_companion_expr(family, j, n)
    if family in (Family.F1, Family.F2):
        return direct, companion
    return companion, direct


def companion_from_relation(direct: Expr, p_sq: float, a_sq: float, source: str) -> Expr:
    """Partner amplitude through the coupled second-order relations.

    source='K': M = (1-x)/(2a sqrt(x)) * [4x(1-x) K'' + 2(1-2x) K' + (p^2 - a^2/(1-x)) K]
    source='M': K = same with the shifted potential (p^2+1, a^2+2).
    """
    a = math.sqrt(a_sq)
    d1 = direct.diff()
    d2 = d1.diff()
    if source == "K":
        pot0, pole1 = p_sq, a_sq
    elif source == "M":
        pot0, pole1 = p_sq + 1.0, a_sq + 2.0
    else:
        raise ValueError("source must be 'K' or 'M'")
    lhs = (
        d2.shift(1, 1).scale(4.0)
        + d1.mul_affine_x(2.0, -4.0)
        + direct.scale(pot0)
        - direct.shift(0, -1).scale(pole1)
    )
    return lhs.shift(-HALF, 1).scale(1.0 / (2.0 * a))


def _elimination_LN(K: Expr, M: Expr, a: float, eps_plus_m: float) -> tuple[Expr, Expr]:
    """L, N from the first two rows of the coupled system (x = cos^2 r).

    L = -(K'_r + (a/sin r) M) / (eps+m)
    N = -(M'_r + M/tan r + (a/sin r) K) / (eps+m)
    """
    L = (K.diff_r_cos2() + M.shift(0, -HALF).scale(a)).scale(-1.0 / eps_plus_m)
    N = (
        M.diff_r_cos2() + M.shift(HALF, -HALF) + K.shift(0, -HALF).scale(a)
    ).scale(-1.0 / eps_plus_m)
    return L, N


def wavefunction_family(family: Family, qn: QuantumNumbers, params: ModeParams, grid) -> RadialSolution:
    """Terminating quasi-polynomial solution of one family at j >= 1."""
    family = Family(family)
    if family not in (Family.F1, Family.F2, Family.F3, Family.F4):
        raise ValueError(f"wavefunction_family handles families i-iv, got {family}")
    if qn.j < 1:
        raise ValueError("families i-iv require j >= 1")
    entry = spectrum(family, qn.j, qn.n, params.m)
    if not entry.bound:
        raise OffSpectrumError(
            f"family iii formula level n=0 (p^2=j^2={entry.p_sq}) carries no "
            "normalizable state; bound states exist for n >= 1"
        )
    if abs(params.p_sq - float(entry.p_sq)) > SPECTRUM_RTOL * max(1.0, float(entry.p_sq)):
        raise OffSpectrumError(
            f"p^2={params.p_sq} is off the {family.value} spectrum value "
            f"{entry.p_sq} at j={qn.j}, n={qn.n}"
        )
    eps_plus_m = params.eps + params.m_eff
    if abs(eps_plus_m) < 1e-12:
        raise EliminationSingularError(
            f"eps+m={eps_plus_m}: cannot recover (L, N); the elimination is "
            "singular at this parameter point"
        )
    K, M = family_KM_exprs(family, qn.j, qn.n)
    L, N = _elimination_LN(K, M, qn.a, eps_plus_m)
    grid = np.asarray(grid, dtype=float)
    return RadialSolution(
        family=family,
        qn=qn,
        params=params,
        grid=grid,
        K=K.eval_r_cos2(grid),
        L=L.eval_r_cos2(grid),
        M=M.eval_r_cos2(grid),
        N=N.eval_r_cos2(grid),
        label=f"{family.value} j={qn.j} n={qn.n}",
        exprs={"K": K, "L": L, "M": M, "N": N},
    )


def general_basis(j: int, p: float, params: ModeParams, grid) -> list[RadialSolution]:
    """Four independent solutions at arbitrary p > 0.

    Two K-led solutions (bound x-exponents 1/2 and 0, hypergeometric
    parameters split by sqrt(p^2+1)) and two M-led ones (split by p); the
    partner of each follows from the coupled relations.
    """
    if j < 1:
        raise ValueError("general basis defined for j >= 1")
    if p <= 0:
        raise ValueError("p must be positive")
    a_sq = j * (j + 1)
    a = math.sqrt(a_sq)
    p_sq = p * p
    jf = Fraction(j, 2)
    sq = math.sqrt(p_sq + 1.0)
    eps_plus_m = params.eps + params.m_eff
    if abs(eps_plus_m) < 1e-12:
        raise EliminationSingularError("eps+m=0: cannot recover (L, N)")
    halfj = 0.5 * j
    seeds = [
        ("K", hyp_expr(1.0, HALF, jf, 1 + halfj - sq / 2, 1 + halfj + sq / 2, 1.5)),
        ("K", hyp_expr(1.0, 0, jf, halfj + 0.5 - sq / 2, halfj + 0.5 + sq / 2, 0.5)),
        ("M", hyp_expr(1.0, HALF, jf, 1 + halfj - p / 2, 1 + halfj + p / 2, 1.5)),
        ("M", hyp_expr(1.0, 0, jf, halfj + 0.5 - p / 2, halfj + 0.5 + p / 2, 0.5)),
    ]
    grid = np.asarray(grid, dtype=float)
    out = []
    for i, (lead, direct) in enumerate(seeds, start=1):
        partner = companion_from_relation(direct, p_sq, a_sq, source=lead)
        K, M = (direct, partner) if lead == "K" else (partner, direct)
        L, N = _elimination_LN(K, M, a, eps_plus_m)
        out.append(
            RadialSolution(
                family=None,
                qn=QuantumNumbers(j, 0),
                params=params,
                grid=grid,
                K=K.eval_r_cos2(grid),
                L=L.eval_r_cos2(grid),
                M=M.eval_r_cos2(grid),
                N=N.eval_r_cos2(grid),
                label=f"basis{i} j={j} p={p:g}",
                exprs={"K": K, "L": L, "M": M, "N": N},
            )
        )
    return out


def assemble_components(K: float, L: float, M: float, N: float,
                        lambda_sign: int = +1, delta_sign: int = +1) -> np.ndarray:
    """Rebuild the 4x4 matrix of radial amplitudes f_ab from (K, L, M, N).

    Rows 1-2 invert the real-combination definitions together with the
    linear constraint (factor lambda); rows 3-4 follow from the
    space-reflection restriction (factor delta).
    """
    f = np.zeros((4, 4), dtype=complex)
    f[0, 2] = (K + 1j * L) / 2.0
    f[1, 3] = (K - 1j * L) / 2.0
    f[0, 3] = (M + 1j * N) / 2.0
    f[1, 2] = (M - 1j * N) / 2.0
    lam = lambda_sign
    f[0, 0] = lam * (K + 1j * L) / 2.0
    f[1, 1] = lam * (K - 1j * L) / 2.0
    f[0, 1] = lam * (M + 1j * N) / 2.0
    f[1, 0] = lam * (M - 1j * N) / 2.0
    d = delta_sign
    f[2, 0] = d * f[1, 3]
    f[2, 1] = d * f[1, 2]
    f[2, 2] = d * f[1, 1]
    f[2, 3] = d * f[1, 0]
    f[3, 0] = d * f[0, 3]
    f[3, 1] = d * f[0, 2]
    f[3, 2] = d * f[0, 1]
    f[3, 3] = d * f[0, 0]
    return f


@dataclass(frozen=True)
class DegeneratePair:
    left: tuple[Family, int, int]
    right: tuple[Family, int, int]
    p_sq: Fraction
    # Identical energy, different wavefunctions (distinct constructors).
    distinct_wavefunctions: bool = True
    left_bound: bool = True
    right_bound: bool = True


def degeneracy_map(j_max: int, n_max: int) -> list[DegeneratePair]:
    """Same-n, j-shifted twin levels: F1(j,n)=F2(j+1,n), F4(j,n)=F3(j+1,n).

    j runs 1..j_max inclusive (the shifted partner may reference j_max+1);
    n runs 0..n_max-1.  Verified in exact integer arithmetic.
    """
    if j_max < 2:
        raise ValueError("j_max must be >= 2")
    pairs = []
    for j in range(1, j_max + 1):
        for n in range(n_max):
            p1 = _p_sq_formula(Family.F1, Fraction(j), n)
            p2 = _p_sq_formula(Family.F2, Fraction(j + 1), n)
            assert p1 == p2
            pairs.append(DegeneratePair((Family.F1, j, n), (Family.F2, j + 1, n), p1))
            p4 = _p_sq_formula(Family.F4, Fraction(j), n)
            p3 = _p_sq_formula(Family.F3, Fraction(j + 1), n)
            assert p4 == p3
            pairs.append(
                DegeneratePair(
                    (Family.F4, j, n),
                    (Family.F3, j + 1, n),
                    p4,
                    right_bound=n >= 1,
                )
            )
    return pairs
