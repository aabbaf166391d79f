"""Numerical verification: operator residuals, factorization identity,
Wronskian independence, and cross-consistency between representations.

Residuals are normalized by the largest participating term, not by the
solution value, because the solutions vanish at the interval endpoints.
All checks are pure functions of their inputs and deterministic for a fixed
grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._exprs import Expr
from .closedform import (
    Family,
    ModeParams,
    QuantumNumbers,
    companion_from_relation,
    family_KM_exprs,
    spectrum,
    wavefunction_family,
)
from .model import LinearDifferentialOperator

__all__ = [
    "VerificationReport",
    "chebyshev_grid",
    "residual_operator",
    "factorization_identity",
    "wronskian4",
    "cross_consistency",
    "default_battery",
    "fd_derivatives",
]

END_BUFFER = 1e-6


@dataclass
class VerificationReport:
    check_name: str
    max_abs_residual: float
    max_rel_residual: float
    sample_count: int
    tolerance: float
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_rel_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "pass": bool(self.passed),
            "max_rel_residual": self.max_rel_residual,
            "tolerance": self.tolerance,
            "samples": self.sample_count,
            "worst_points": [list(map(float, p)) for p in self.details],
        }


def chebyshev_grid(n: int = 200, lo: float = 0.02, hi: float = 0.98) -> np.ndarray:
    """n Chebyshev-distributed points on [lo, hi], clustered at the ends."""
    k = np.arange(n)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * n))
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes)


def _report(name, x, resid, scale, tol, keep=3) -> VerificationReport:
    scale = np.where(scale > 0, scale, 1.0)
    rel = np.abs(resid) / scale
    worst = np.argsort(rel)[::-1][:keep]
    return VerificationReport(
        check_name=name,
        max_abs_residual=float(np.max(np.abs(resid))),
        max_rel_residual=float(np.max(rel)),
        sample_count=len(np.atleast_1d(x)),
        tolerance=tol,
        details=[(float(np.atleast_1d(x)[i]), float(rel[i])) for i in worst],
    )


def residual_operator(op: LinearDifferentialOperator, x, derivs,
                      tolerance: float = 1e-9, name: str = "operator-residual") -> VerificationReport:
    """Pointwise sum_k c_k(x) y^(k)(x), term-scaled.

    derivs[k] must hold y^(k) on x, k = 0..op.order, produced analytically
    or by the finite-difference fallback.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < END_BUFFER) or np.any(x > 1.0 - END_BUFFER):
        raise ValueError(f"grid touches the singular endpoints within {END_BUFFER}")
    resid = op.apply(x, derivs)
    scale = op.term_magnitudes(x, derivs).max(axis=0)
    return _report(name, x, resid, scale, tolerance)


def residual_operator_expr(op: LinearDifferentialOperator, expr: Expr, x,
                           tolerance: float = 1e-9, name: str = "operator-residual") -> VerificationReport:
    x = np.asarray(x, dtype=float)
    derivs = [expr.diff_x(k).eval_x(x) for k in range(op.order + 1)]
    return residual_operator(op, x, derivs, tolerance, name)


class BatteryFunction:
    """Test function with analytic derivatives to order 4."""

    def __init__(self, name, derivs):
        self.name = name
        self._derivs = derivs

    def derivatives(self, x, upto=4):
        x = np.asarray(x, dtype=float)
        return [d(x) for d in self._derivs[: upto + 1]]


def _poly_battery(max_degree=6):
    out = []
    for d in range(1, max_degree + 1):
        derivs = []
        for k in range(5):
            if k > d:
                derivs.append(lambda x, c=0.0: np.zeros_like(x))
            else:
                c = math.factorial(d) / math.factorial(d - k)
                derivs.append(lambda x, c=c, p=d - k: c * x**p)
        out.append(BatteryFunction(f"x^{d}", derivs))
    return out


def _sin_battery(ks=(1, 2, 3)):
    out = []
    for k in ks:
        derivs = [
            lambda x, k=k: np.sin(k * x),
            lambda x, k=k: k * np.cos(k * x),
            lambda x, k=k: -(k**2) * np.sin(k * x),
            lambda x, k=k: -(k**3) * np.cos(k * x),
            lambda x, k=k: k**4 * np.sin(k * x),
        ]
        out.append(BatteryFunction(f"sin({k}x)", derivs))
    return out


def default_battery():
    return _poly_battery() + _sin_battery()


def compose_apply(outer: LinearDifferentialOperator, inner: LinearDifferentialOperator,
                  x, derivs) -> np.ndarray:
    """(outer o inner) phi from derivatives of phi to order outer.order+inner.order.

    psi = inner(phi) and its derivatives follow by the Leibniz rule on the
    coefficient functions; no coefficient-level composition is formed.
    """
    x = np.asarray(x, dtype=float)
    # psi^(m) = sum_k sum_{i<=m} C(m,i) c_k^(m-i) phi^(k+i)
    coeff_derivs = []
    for c in inner.coeffs:
        row = [c]
        for _ in range(outer.order):
            row.append(row[-1].derivative())
        coeff_derivs.append(row)
    psi_derivs = []
    for mth in range(outer.order + 1):
        acc = np.zeros_like(x)
        for k in range(inner.order + 1):
            for i in range(mth + 1):
                acc = acc + math.comb(mth, i) * coeff_derivs[k][mth - i](x) * np.asarray(
                    derivs[k + i], dtype=float
                )
        psi_derivs.append(acc)
    return outer.apply(x, psi_derivs)


def factorization_identity(outer: LinearDifferentialOperator, inner: LinearDifferentialOperator,
                           direct: LinearDifferentialOperator, battery=None, x=None,
                           tolerance: float = 1e-10) -> VerificationReport:
    """Compare x^2 * (outer o inner) phi against (direct) phi pointwise.

    The x^2 factor restores the direct operator's leading coefficient; the
    factor pair is monic.  Battery defaults to polynomials up to degree 6
    and sin(kx), k in {1,2,3}, on [0.05, 0.95].
    """
    battery = battery if battery is not None else default_battery()
    x = np.asarray(x if x is not None else np.linspace(0.05, 0.95, 91), dtype=float)
    worst = None
    for fn in battery:
        derivs = fn.derivatives(x, upto=4)
        composed = x**2 * compose_apply(outer, inner, x, derivs)
        straight = direct.apply(x, derivs)
        scale = np.maximum(
            direct.term_magnitudes(x, derivs).max(axis=0), np.abs(composed)
        )
        rep = _report(f"factorization[{fn.name}]", x, composed - straight, scale, tolerance)
        if worst is None or rep.max_rel_residual > worst.max_rel_residual:
            worst = rep
    worst.check_name = "factorization-identity"
    return worst


def wronskian4(solutions, x0: float) -> float:
    """Determinant of [y_i^(k)(x0)], k = 0..3, after equilibration.

    Each derivative-order row is scaled to unit sup first (the four orders
    live on wildly different scales near the singular endpoints, which
    would leave every column nearly parallel to the top-derivative axis),
    then each solution column to unit sup.  Both scalings preserve
    "zero iff linearly dependent".

    solutions: four objects with .derivative_column(x0, 3) (Expr works), or
    four ready-made columns.
    """
    if not 0.05 <= x0 <= 0.95:
        raise ValueError("x0 must sit at least 0.05 away from the endpoints")
    cols = []
    for s in solutions:
        col = s.derivative_column(x0, 3) if hasattr(s, "derivative_column") else np.asarray(s, dtype=float)
        cols.append(col)
    mat = np.array(cols).T
    row_sup = np.abs(mat).max(axis=1, keepdims=True)
    mat = mat / np.where(row_sup > 0, row_sup, 1.0)
    col_sup = np.abs(mat).max(axis=0, keepdims=True)
    mat = mat / np.where(col_sup > 0, col_sup, 1.0)
    return float(np.linalg.det(mat))


def cross_consistency(family: Family, qn: QuantumNumbers, params: ModeParams,
                      x=None, tolerance: float = 1e-10) -> VerificationReport:
    """Companion amplitude via the coupled relation vs the explicit formula,
    plus the first-order system residual of the assembled quadruple."""
    x = np.asarray(x if x is not None else chebyshev_grid(), dtype=float)
    entry = spectrum(family, qn.j, qn.n, params.m)
    p2, a2 = float(entry.p_sq), qn.a_sq
    K, M = family_KM_exprs(family, qn.j, qn.n)
    if family in (Family.F1, Family.F2):
        via = companion_from_relation(K, p2, a2, "K")
        explicit = M
    else:
        via = companion_from_relation(M, p2, a2, "M")
        explicit = K
    diff = via.eval_x(x) - explicit.eval_x(x)
    scale = np.maximum(np.abs(explicit.eval_x(x)), np.abs(via.eval_x(x))).max()
    rep1 = _report(f"companion[{family.value}]", x, diff, np.full_like(x, scale), tolerance)

    r = np.arccos(np.sqrt(x))  # left-half radial points matching the x grid
    r = np.concatenate([r, np.pi - r])
    sol = wavefunction_family(family, qn, params, r)
    resid, scale_r = _system_residual(sol)
    rep2 = _report(f"system[{family.value}]", r, resid, scale_r, tolerance)
    rep = rep1 if rep1.max_rel_residual >= rep2.max_rel_residual else rep2
    return VerificationReport(
        check_name=f"cross-consistency[{family.value} j={qn.j} n={qn.n}]",
        max_abs_residual=max(rep1.max_abs_residual, rep2.max_abs_residual),
        max_rel_residual=max(rep1.max_rel_residual, rep2.max_rel_residual),
        sample_count=rep1.sample_count + rep2.sample_count,
        tolerance=tolerance,
        details=rep.details,
    )


def _system_residual(sol) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise residual rows of the coupled first-order system, stacked."""
    r = sol.grid
    eps, m = sol.params.eps, sol.params.m_eff
    a = sol.qn.a
    Ke, Le, Me, Ne = (sol.exprs[k] for k in "KLMN")
    K, L, M, N = sol.K, sol.L, sol.M, sol.N
    dK = Ke.diff_r_cos2().eval_r_cos2(r)
    dL = Le.diff_r_cos2().eval_r_cos2(r)
    dM = Me.diff_r_cos2().eval_r_cos2(r)
    dN = Ne.diff_r_cos2().eval_r_cos2(r)
    s, ct = 1.0 / np.sin(r), 1.0 / np.tan(r)
    rows = np.array(
        [
            dK + a * s * M + (eps + m) * L,
            dL - a * s * N - (eps - m) * K,
            dM + ct * M + a * s * K + (eps + m) * N,
            dN - ct * N - a * s * L - (eps - m) * M,
        ]
    )
    scales = np.array(
        [
            np.max(np.abs([dK, a * s * M, (eps + m) * L]), axis=0),
            np.max(np.abs([dL, a * s * N, (eps - m) * K]), axis=0),
            np.max(np.abs([dM, ct * M, a * s * K, (eps + m) * N]), axis=0),
            np.max(np.abs([dN, ct * N, a * s * L, (eps - m) * M]), axis=0),
        ]
    )
    # One combined row: worst equation per point.
    rel = np.abs(rows) / np.where(scales > 0, scales, 1.0)
    idx = rel.argmax(axis=0)
    take = np.arange(rows.shape[1])
    return rows[idx, take], scales[idx, take]


def fd_derivatives(x: np.ndarray, y: np.ndarray, order: int, stencil: int = 9) -> np.ndarray:
    """Derivatives at interior nodes by Fornberg weights on a sliding stencil.

    Fallback for sampled data without analytic derivatives (e.g. re-read
    CSV output).  Returns d^order y/dx^order at every x, with one-sided
    stencils near the ends.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    half = stencil // 2
    out = np.empty(n)
    for i in range(n):
        lo = max(0, min(i - half, n - stencil))
        nodes = x[lo : lo + stencil]
        w = _fornberg(x[i], nodes, order)
        out[i] = w @ y[lo : lo + stencil]
    return out


def _fornberg(x0: float, nodes: np.ndarray, order: int) -> np.ndarray:
    """Fornberg (1988) finite-difference weights for d^order/dx^order at x0."""
    n = len(nodes)
    d = np.zeros((n, order + 1))
    d[0, 0] = 1.0
    c1 = 1.0
    for i in range(1, n):
        c2 = 1.0
        prev_row = d[i - 1].copy()
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            for k in range(min(i, order), -1, -1):
                d[j, k] = ((nodes[i] - x0) * d[j, k] - (k * d[j, k - 1] if k else 0.0)) / c3
        for k in range(min(i, order), -1, -1):
            d[i, k] = c1 / c2 * ((k * prev_row[k - 1] if k else 0.0) - (nodes[i - 1] - x0) * prev_row[k])
        c1 = c2
    return d[:, order]
