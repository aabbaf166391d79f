"""Eigenvalue recovery straight from the radial ODE systems.

Nothing here touches the closed forms: bound states are located by
integrating the regular solution spaces inward from both poles of the
sphere and finding the energies where the matched solution matrix turns
singular.  Serves as the ground truth the hypergeometric construction is
checked against.

Regular initial data comes from a short Frobenius expansion of each system
at its pole; the r=pi data is the r=0 data pushed through the reflection
symmetry (K, L, M, N)(r) -> (K, -L, -M, N)(pi - r) of the coupled system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .closedform import SpectrumEntry

__all__ = [
    "ShootingConfig",
    "OracleEigenvalue",
    "SpectrumComparison",
    "shoot_j0",
    "shoot_j",
    "compare_spectra",
]

FROBENIUS_TERMS = 5


@dataclass(frozen=True)
class ShootingConfig:
    r_start_offset: float = 1e-3
    integrator_rtol: float = 1e-10
    integrator_atol: float = 1e-13
    scan_rtol: float = 1e-8
    eps_scan: tuple[float, float, float] = (0.1, 5.0, 0.02)
    match_point: float = math.pi / 2
    det_tolerance: float = 1e-8
    bisect_xtol: float = 1e-10
    method: str = "DOP853"

    def __post_init__(self):
        lo, hi, step = self.eps_scan
        if not (0 < self.r_start_offset < self.match_point < math.pi - self.r_start_offset):
            raise ValueError("need 0 < r_start_offset < match_point < pi - r_start_offset")
        if not (0 <= lo < hi and step > 0):
            raise ValueError(f"bad eps scan range {self.eps_scan}")


@dataclass
class OracleEigenvalue:
    eps: float
    p_sq: float
    j: int
    bracket: tuple[float, float]
    node_count: int | None = None
    multiplicity: int = 1
    matched_family_guess: str | None = None
    flags: list = field(default_factory=list)


@dataclass
class SpectrumComparison:
    matched: list
    unmatched_oracle: list
    unmatched_closed: list

    @property
    def passed(self) -> bool:
        return not self.unmatched_oracle and not self.unmatched_closed

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "matched": [
                {
                    "eps_oracle": ev.eps,
                    "p_sq_oracle": ev.p_sq,
                    "family": entry.family.value,
                    "j": str(entry.j_or_J),
                    "n": entry.n,
                    "p_sq_exact": str(entry.p_sq),
                    "rel_error": rel,
                }
                for ev, entry, rel in self.matched
            ],
            "unmatched_oracle": [{"eps": ev.eps, "p_sq": ev.p_sq} for ev in self.unmatched_oracle],
            "unmatched_closed": [
                {"family": e.family.value, "j": str(e.j_or_J), "n": e.n, "p_sq": str(e.p_sq)}
                for e in self.unmatched_closed
            ],
        }


# -- j = 0: scalar equation M'' + (eps^2 - m^2 - (1+cos^2 r)/sin^2 r) M = 0 --

def _j0_rhs_factory(p_sq_vec: np.ndarray):
    n = len(p_sq_vec)

    def rhs(r, y):
        y = y.reshape(2, n)
        pot = (1.0 + math.cos(r) ** 2) / math.sin(r) ** 2
        return np.concatenate([y[1], (pot - p_sq_vec) * y[0]])

    return rhs


def _j0_initial(r0: float, p_sq: np.ndarray) -> np.ndarray:
    # Regular branch M ~ r^2 (1 + c2 r^2), c2 = -(1/3 + p^2)/10.
    c2 = -(1.0 / 3.0 + p_sq) / 10.0
    M = r0**2 * (1.0 + c2 * r0**2)
    dM = 2.0 * r0 + 4.0 * c2 * r0**3
    return M, dM


def _j0_boundary_value(eps_vec: np.ndarray, m: float, config: ShootingConfig,
                       rtol: float, count_nodes: bool = False):
    """Value of the left-regular solution at pi - offset (zero iff eigen)."""
    eps_vec = np.atleast_1d(np.asarray(eps_vec, dtype=float))
    p_sq = eps_vec**2 - m * m
    r0 = config.r_start_offset
    M0, dM0 = _j0_initial(r0, p_sq)
    y0 = np.concatenate([np.broadcast_to(M0, eps_vec.shape), np.broadcast_to(dM0, eps_vec.shape)])
    t_eval = np.linspace(r0, math.pi - r0, 200) if count_nodes else None
    sol = solve_ivp(
        _j0_rhs_factory(p_sq), (r0, math.pi - r0), y0,
        rtol=rtol, atol=config.integrator_atol, method=config.method, t_eval=t_eval,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    end = sol.y[: len(eps_vec), -1]
    if count_nodes:
        # Interior sign alternations; endpoint regions are dropped because
        # the residual singular admixture flips sign there at no cost.
        track = sol.y[: len(eps_vec), :]
        trim = track.shape[1] // 20
        nodes = []
        for row in track:
            row = row[trim:-trim]
            row = row[np.abs(row) > 1e-8 * np.abs(row).max()]
            nodes.append(int(np.sum(np.diff(np.sign(row)) != 0)))
        return end, nodes
    return end


def shoot_j0(m: float, lambda_sign: int = +1, config: ShootingConfig | None = None) -> list[OracleEigenvalue]:
    """Eigenvalues of the j=0 problem in the configured scan range.

    lambda_sign only flips the mass sign, which the scalar equation does
    not see; the argument is kept for interface symmetry.
    """
    del lambda_sign  # enters only as m -> -m; the equation depends on m^2
    config = config or ShootingConfig()
    lo, hi, step = config.eps_scan
    eps_grid = np.arange(lo, hi + step, step)
    eps_grid = eps_grid[eps_grid <= hi + 1e-12]
    vals = _j0_boundary_value(eps_grid, m, config, config.scan_rtol)
    out = []
    for i in range(len(eps_grid) - 1):
        if not (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])):
            continue
        if np.sign(vals[i]) == np.sign(vals[i + 1]):
            continue
        root = brentq(
            lambda e: float(_j0_boundary_value(e, m, config, config.integrator_rtol)[0]),
            eps_grid[i], eps_grid[i + 1], xtol=config.bisect_xtol,
        )
        _, nodes = _j0_boundary_value(np.array([root]), m, config, config.integrator_rtol, count_nodes=True)
        out.append(
            OracleEigenvalue(
                eps=root, p_sq=root * root - m * m, j=0,
                bracket=(float(eps_grid[i]), float(eps_grid[i + 1])),
                node_count=nodes[0], matched_family_guess="j0",
            )
        )
    out.sort(key=lambda ev: ev.node_count if ev.node_count is not None else ev.eps)
    return out


# -- j >= 1: 4-channel determinant matching ---------------------------------

def _series_matrices(j: int, eps: float, m: float) -> list:
    """A(r) = A_-1/r + A_0 + A_1 r + A_3 r^3 + ... around r=0."""
    a = math.sqrt(j * (j + 1))
    # 1/sin r = 1/r + r/6 + 7 r^3/360 + ...; cot r = 1/r - r/3 - r^3/45 - ...
    def block(inv_sin, cot):
        return np.array(
            [
                [0.0, 0.0, -a * inv_sin, 0.0],
                [0.0, 0.0, 0.0, a * inv_sin],
                [-a * inv_sin, 0.0, -cot, 0.0],
                [0.0, a * inv_sin, 0.0, cot],
            ]
        )

    A_m1 = block(1.0, 1.0)
    A_0 = np.array(
        [
            [0.0, -(eps + m), 0.0, 0.0],
            [eps - m, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -(eps + m)],
            [0.0, 0.0, eps - m, 0.0],
        ]
    )
    A_1 = block(1.0 / 6.0, -1.0 / 3.0)
    A_3 = block(7.0 / 360.0, -1.0 / 45.0)
    return [A_m1, A_0, A_1, np.zeros((4, 4)), A_3]


def _frobenius_initial(j: int, eps: float, m: float, r0: float) -> np.ndarray:
    """Two regular columns (K, L, M, N)(r0); leading powers r^j and r^(j+1).

    Resonant orders (s+k an exponent of A_-1) are solved in the
    least-squares sense; any homogeneous admixture only re-mixes the
    regular basis.
    """
    mats = _series_matrices(j, eps, m)
    A_m1 = mats[0]
    a = math.sqrt(j * (j + 1))
    seeds = [
        (j, np.array([1.0, 0.0, -j / a, 0.0])),
        (j + 1, np.array([0.0, 1.0, 0.0, (j + 1) / a])),
    ]
    cols = []
    eye = np.eye(4)
    for s, c0 in seeds:
        coeffs = [c0]
        for k in range(1, FROBENIUS_TERMS):
            rhs = np.zeros(4)
            for power, Ap in enumerate(mats[1:], start=0):
                if k - 1 - power >= 0:
                    rhs -= Ap @ coeffs[k - 1 - power]
            Mk = A_m1 - (s + k) * eye
            sol, *_ = np.linalg.lstsq(Mk, rhs, rcond=None)
            coeffs.append(sol)
        y = np.zeros(4)
        for k, ck in enumerate(coeffs):
            y += ck * r0 ** (s + k)
        cols.append(y)
    return np.array(cols).T  # 4 x 2


MIRROR = np.array([1.0, -1.0, -1.0, 1.0])


def _match_matrix_batch(eps_vec: np.ndarray, m: float, j: int, config: ShootingConfig,
                        rtol: float) -> np.ndarray:
    """Stacked 4x4 match matrices [left cols | right cols] at the match point."""
    eps_vec = np.atleast_1d(np.asarray(eps_vec, dtype=float))
    nb = len(eps_vec)
    a = math.sqrt(j * (j + 1))
    em_plus = eps_vec + m
    em_minus = eps_vec - m

    def rhs(r, y):
        y = y.reshape(4, 2, nb)
        s = 1.0 / math.sin(r)
        ct = 1.0 / math.tan(r)
        K, L, M, N = y[0], y[1], y[2], y[3]
        dK = -em_plus * L - a * s * M
        dL = em_minus * K + a * s * N
        dM = -a * s * K - ct * M - em_plus * N
        dN = a * s * L + em_minus * M + ct * N
        return np.stack([dK, dL, dM, dN]).reshape(-1)

    r0 = config.r_start_offset
    mp = config.match_point
    cols_left = np.empty((4, 2, nb))
    cols_init = np.empty((4, 2, nb))
    for i, e in enumerate(eps_vec):
        cols_init[:, :, i] = _frobenius_initial(j, e, m, r0)
    sol = solve_ivp(
        rhs, (r0, mp), cols_init.reshape(-1),
        rtol=rtol, atol=config.integrator_atol, method=config.method,
    )
    if not sol.success:
        raise RuntimeError(f"left integration failed: {sol.message}")
    cols_left = sol.y[:, -1].reshape(4, 2, nb)

    # Mirror construction at r = pi: the reflection symmetry maps the
    # regular space at 0 onto the regular space at pi.
    cols_init_r = cols_init * MIRROR[:, None, None]
    sol = solve_ivp(
        rhs, (math.pi - r0, mp), cols_init_r.reshape(-1),
        rtol=rtol, atol=config.integrator_atol, method=config.method,
    )
    if not sol.success:
        raise RuntimeError(f"right integration failed: {sol.message}")
    cols_right = sol.y[:, -1].reshape(4, 2, nb)

    out = np.empty((nb, 4, 4))
    out[:, :, 0:2] = np.moveaxis(cols_left, 2, 0)
    out[:, :, 2:4] = np.moveaxis(cols_right, 2, 0)
    return out


def _normalized_det(mats: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mats, axis=1, keepdims=True)
    norms = np.where(norms > 0, norms, 1.0)
    return np.linalg.det(mats / norms)


def _det_at(eps: float, m: float, j: int, config: ShootingConfig, rtol: float) -> float:
    return float(_normalized_det(_match_matrix_batch(np.array([eps]), m, j, config, rtol))[0])


def shoot_j(m: float, j: int, lambda_sign: int = +1, config: ShootingConfig | None = None) -> list[OracleEigenvalue]:
    """Bound-state energies of the coupled j >= 1 system.

    Two-parameter regular spaces are integrated from both poles to the
    match point; eigenvalues are the sign changes of the normalized 4x4
    determinant, refined by bisection.
    """
    if j < 1:
        raise ValueError("shoot_j requires j >= 1; use shoot_j0")
    config = config or ShootingConfig()
    m_eff = lambda_sign * m
    lo, hi, step = config.eps_scan
    eps_grid = np.arange(lo, hi + step, step)
    eps_grid = eps_grid[eps_grid <= hi + 1e-12]
    # The (L, N) elimination scale eps+m never vanishes off eps=|m|; skip a
    # small window around it where the regular-space columns degenerate.
    eps_grid = eps_grid[np.abs(eps_grid - abs(m_eff)) > 1e-6]

    def scan(rtol):
        return _normalized_det(_match_matrix_batch(eps_grid, m_eff, j, config, rtol))

    try:
        dets = scan(config.scan_rtol)
    except RuntimeError:
        config = replace(config, r_start_offset=config.r_start_offset / 2)
        dets = scan(config.scan_rtol)

    out = []
    for i in range(len(eps_grid) - 1):
        if not (np.isfinite(dets[i]) and np.isfinite(dets[i + 1])):
            continue
        if np.sign(dets[i]) == np.sign(dets[i + 1]):
            continue
        root = brentq(
            lambda e: _det_at(e, m_eff, j, config, config.integrator_rtol),
            eps_grid[i], eps_grid[i + 1], xtol=config.bisect_xtol,
        )
        mats = _match_matrix_batch(np.array([root]), m_eff, j, config, config.integrator_rtol)
        norms = np.linalg.norm(mats[0], axis=0)
        sv = np.linalg.svd(mats[0] / np.where(norms > 0, norms, 1.0), compute_uv=False)
        flags = []
        if sv[0] > 0 and sv[-1] / sv[0] > config.det_tolerance:
            flags.append("weak-singularity")
        multiplicity = 2 if sv[0] > 0 and sv[-2] / sv[0] < 1e-6 else 1
        out.append(
            OracleEigenvalue(
                eps=root, p_sq=root * root - m * m, j=j,
                bracket=(float(eps_grid[i]), float(eps_grid[i + 1])),
                multiplicity=multiplicity, flags=flags,
            )
        )
    return out


def compare_spectra(oracle: list[OracleEigenvalue], closed: list[SpectrumEntry],
                    rel_tol: float = 1e-5, eps_sign: int = +1) -> SpectrumComparison:
    """Greedy nearest-eps matching of oracle eigenvalues to closed entries."""
    remaining = list(closed)
    matched, unmatched_oracle = [], []
    for ev in sorted(oracle, key=lambda e: e.eps):
        best, best_rel = None, None
        for entry in remaining:
            target = entry.eps(eps_sign)
            rel = abs(ev.eps - target) / max(abs(target), 1e-300)
            if best_rel is None or rel < best_rel:
                best, best_rel = entry, rel
        if best is not None and best_rel <= rel_tol:
            matched.append((ev, best, best_rel))
            ev.matched_family_guess = best.family.value
            remaining.remove(best)
        else:
            unmatched_oracle.append(ev)
    return SpectrumComparison(matched, unmatched_oracle, remaining)
