"""Command-line surface: spectrum tables, sampled wavefunctions, degeneracy
maps, verification and oracle reports.

Output contract: CSV with LF line endings and '#'-prefixed comment headers,
floats in shortest round-trip form; JSON in UTF-8 with stable key order.
Exit status 0 on success / all checks passing, 1 on a verification or
comparison failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import closedform, oracle, verify
from .closedform import Family, ModeParams, QuantumNumbers
from .model import factor_pair_K, factor_pair_M, operator_K4, operator_M4

END_BUFFER = 1e-3
DK_FAMILIES = (Family.F1, Family.F2, Family.F3, Family.F4)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(float(v))  # shortest round-trip decimal
    return str(v)


def _fraction_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(comments: list[str], header: list[str], rows: list[list]) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _parse_mass(s: str) -> Fraction:
    return Fraction(s)


def _radial_grid(size: int) -> np.ndarray:
    return np.linspace(END_BUFFER, math.pi - END_BUFFER, size)


def cmd_spectrum(args) -> int:
    mass = _parse_mass(args.mass)
    fams: list[Family]
    if args.family == "all-dk":
        fams = list(DK_FAMILIES) if args.j and args.j >= 1 else [Family.J0]
    else:
        fams = [Family(args.family)]
    n_values = range(args.n_max + 1) if args.n is None else [args.n]
    rows = []
    for fam in fams:
        j_or_J = args.J if fam is Family.DIRAC else (args.j or 0)
        for n in n_values:
            e = closedform.spectrum(fam, j_or_J, n, mass)
            eps = args.eps_sign * math.sqrt(float(e.eps_sq))
            partner = (
                f"{e.degenerate_partner[0].value} j={e.degenerate_partner[1]} n={e.degenerate_partner[2]}"
                if e.degenerate_partner
                else ""
            )
            rows.append(
                [
                    fam.value,
                    _fraction_str(e.j_or_J),
                    n,
                    _fraction_str(e.p_sq),
                    float(e.p_sq),
                    eps,
                    "yes" if e.bound else "no",
                    partner,
                ]
            )
    comments = [f"mass={mass}", f"eps_sign={args.eps_sign:+d}"]
    header = ["family", "j", "n", "p_sq_exact", "p_sq", "eps", "bound", "degenerate_partner"]
    if args.format == "json":
        payload = [dict(zip(header, r)) for r in rows]
        _write(args.out, _json(payload))
    else:
        _write(args.out, _csv(comments, header, rows))
    return 0


def cmd_wavefunction(args) -> int:
    mass = float(_parse_mass(args.mass))
    grid = _radial_grid(args.grid)
    fam = Family(args.family)
    if fam is Family.DIRAC:
        print("wavefunction: the comparison series has no wavefunction here", file=sys.stderr)
        return 2
    if fam is not Family.J0 and args.j < 1:
        print(f"wavefunction: family {fam.value} needs --j >= 1", file=sys.stderr)
        return 2
    entry = closedform.spectrum(fam, args.j if fam is not Family.J0 else 0, args.n, mass)
    eps = args.eps_sign * math.sqrt(float(entry.eps_sq))
    params = ModeParams(m=mass, eps=eps, lambda_sign=args.lam, delta_sign=args.delta)
    comments = [
        f"family={fam.value}",
        f"j={_fraction_str(entry.j_or_J)}",
        f"n={args.n}",
        f"p_sq={_fraction_str(entry.p_sq)}",
        f"mass={args.mass}",
        f"lambda={args.lam:+d}",
        f"delta={args.delta:+d}",
        f"eps={eps!r}",
    ]
    if fam is Family.J0:
        sol = closedform.wavefunction_j0(args.n, params, grid)
        x = (1.0 - np.cos(grid)) / 2.0
        header = ["r", "x", "M", "N"]
        rows = [[r, xv, mv, nv] for r, xv, mv, nv in zip(grid, x, sol.M, sol.N)]
    else:
        sol = closedform.wavefunction_family(fam, QuantumNumbers(args.j, args.n), params, grid)
        x = np.cos(grid) ** 2
        header = ["r", "x", "K", "L", "M", "N"]
        rows = [
            [r, xv, kv, lv, mv, nv]
            for r, xv, kv, lv, mv, nv in zip(grid, x, sol.K, sol.L, sol.M, sol.N)
        ]
    _write(args.out, _csv(comments, header, rows))
    return 0


def _verify_reports(args) -> list[dict]:
    mass = float(_parse_mass(args.mass))
    j = args.j if args.j and args.j >= 1 else 1
    n = args.n if args.n is not None else 0
    suites = (
        ("operators", "factorization", "wronskian", "cross", "j0")
        if args.suite == "all"
        else (args.suite,)
    )
    reports = []
    xg = verify.chebyshev_grid()
    if "operators" in suites or "cross" in suites:
        fam_n = {Family.F1: n, Family.F2: n, Family.F3: max(n, 1), Family.F4: n}
    if "operators" in suites:
        for fam, nn in fam_n.items():
            entry = closedform.spectrum(fam, j, nn, mass)
            K, M = closedform.family_KM_exprs(fam, j, nn)
            p2, a2 = float(entry.p_sq), j * (j + 1)
            rep = verify.residual_operator_expr(
                operator_K4(p2, a2), K, xg, name=f"operator-K[{fam.value} j={j} n={nn}]"
            )
            reports.append(rep.to_dict())
            rep = verify.residual_operator_expr(
                operator_M4(p2, a2), M, xg, name=f"operator-M[{fam.value} j={j} n={nn}]"
            )
            reports.append(rep.to_dict())
    if "factorization" in suites:
        entry = closedform.spectrum(Family.F1, j, n, mass)
        p2, a2 = float(entry.p_sq), j * (j + 1)
        rep = verify.factorization_identity(*factor_pair_K(p2, a2), operator_K4(p2, a2))
        rep.check_name = f"factorization-K[p2={p2:g}]"
        reports.append(rep.to_dict())
        rep = verify.factorization_identity(*factor_pair_M(p2, a2), operator_M4(p2, a2))
        rep.check_name = f"factorization-M[p2={p2:g}]"
        reports.append(rep.to_dict())
    if "wronskian" in suites:
        p = 2.3
        params = ModeParams(m=mass, eps=math.sqrt(p * p + mass * mass))
        basis = closedform.general_basis(j, p, params, np.array([1.0]))
        for x0 in (0.3, 0.6):
            w = verify.wronskian4([b.exprs["K"] for b in basis], x0)
            reports.append(
                {
                    "check_name": f"wronskian[j={j} p={p} x0={x0}]",
                    "pass": bool(abs(w) > 1e-6),
                    "max_rel_residual": 1.0 / abs(w) if w else math.inf,
                    "tolerance": 1e6,
                    "samples": 1,
                    "worst_points": [[x0, abs(w)]],
                }
            )
    if "cross" in suites:
        for fam, nn in fam_n.items():
            entry = closedform.spectrum(fam, j, nn, mass)
            params = ModeParams.from_p_sq(mass, float(entry.p_sq), lambda_sign=args.lam)
            rep = verify.cross_consistency(fam, QuantumNumbers(j, nn), params)
            reports.append(rep.to_dict())
    if "j0" in suites:
        eps = math.sqrt(mass * mass - 1.0 + (2 + n) ** 2)
        params = ModeParams(m=mass, eps=eps, lambda_sign=args.lam)
        grid = np.linspace(0.05, math.pi - 0.05, 101)
        sol = closedform.wavefunction_j0(n, params, grid)
        Me, Ne = sol.exprs["M"], sol.exprs["N"]
        dM = Me.diff_r_half().eval_r_half(grid)
        dN = Ne.diff_r_half().eval_r_half(grid)
        m_eff = params.m_eff
        ct = 1.0 / np.tan(grid)
        r1 = dM + ct * sol.M + (eps + m_eff) * sol.N
        r2 = dN - ct * sol.N - (eps - m_eff) * sol.M
        scale = max(np.abs(sol.M).max(), np.abs(sol.N).max()) * max(abs(eps) + abs(m_eff), 1.0)
        resid = max(np.max(np.abs(r1)), np.max(np.abs(r2))) / scale
        reports.append(
            {
                "check_name": f"j0-pair[n={n} lambda={args.lam:+d}]",
                "pass": bool(resid <= 1e-9),
                "max_rel_residual": float(resid),
                "tolerance": 1e-9,
                "samples": len(grid),
                "worst_points": [],
            }
        )
    return reports


def cmd_verify(args) -> int:
    reports = _verify_reports(args)
    _write(args.out, _json(reports))
    return 0 if all(r["pass"] for r in reports) else 1


def cmd_oracle(args) -> int:
    mass = float(_parse_mass(args.mass))
    cfg = oracle.ShootingConfig(
        eps_scan=(args.eps_min, args.eps_max, args.eps_step),
        r_start_offset=args.r_offset,
    )
    if args.j == 0:
        evs = oracle.shoot_j0(mass, args.lam, cfg)
    else:
        evs = oracle.shoot_j(mass, args.j, args.lam, cfg)
    payload = {
        "j": args.j,
        "mass": mass,
        "eigenvalues": [
            {
                "eps": e.eps,
                "p_sq": e.p_sq,
                "bracket": list(e.bracket),
                "nodes": e.node_count,
                "multiplicity": e.multiplicity,
                "family_guess": e.matched_family_guess,
            }
            for e in evs
        ],
    }
    status = 0
    if args.compare:
        if args.j == 0:
            closed = [
                closedform.spectrum(Family.J0, 0, n, mass)
                for n in range(args.n_max + 1)
                if math.sqrt(float(closedform.spectrum(Family.J0, 0, n, mass).eps_sq)) <= args.eps_max
            ]
        else:
            closed = [
                e
                for e in closedform.family_levels(args.j, args.n_max, mass)
                if args.eps_min <= math.sqrt(float(e.eps_sq)) <= args.eps_max
            ]
        cmp = oracle.compare_spectra(evs, closed)
        payload["comparison"] = cmp.to_dict()
        status = 0 if cmp.passed else 1
    _write(args.out, _json(payload))
    return status


def cmd_degeneracy(args) -> int:
    pairs = closedform.degeneracy_map(args.j_max, args.n_max)
    header = [
        "family_a", "j_a", "n_a", "family_b", "j_b", "n_b", "p_sq",
        "distinct_wavefunctions", "both_bound",
    ]
    rows = [
        [
            p.left[0].value, p.left[1], p.left[2],
            p.right[0].value, p.right[1], p.right[2],
            _fraction_str(p.p_sq),
            "yes" if p.distinct_wavefunctions else "no",
            "yes" if (p.left_bound and p.right_bound) else "no",
        ]
        for p in pairs
    ]
    comments = [f"j_max={args.j_max}", f"n_max={args.n_max}", f"pairs={len(rows)}"]
    if args.format == "json":
        _write(args.out, _json([dict(zip(header, r)) for r in rows]))
    else:
        _write(args.out, _csv(comments, header, rows))
    return 0


def _load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dkradial", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt_default):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--config", default=None, help="flat key=value config file; flags win")

    p = sub.add_parser("spectrum", help="exact discrete spectrum tables")
    p.add_argument("--family", required=True,
                   choices=("f1", "f2", "f3", "f4", "j0", "dirac", "all-dk"))
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--J", default=None, help="half-odd J for the comparison series, e.g. 1/2")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-max", type=int, default=0)
    p.add_argument("--mass", default="0")
    p.add_argument("--eps-sign", type=int, choices=(-1, 1), default=1)
    common(p, "csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("wavefunction", help="sampled radial amplitudes")
    p.add_argument("--family", required=True, choices=("f1", "f2", "f3", "f4", "j0"))
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mass", default="0")
    p.add_argument("--lambda", dest="lam", type=int, choices=(-1, 1), default=1)
    p.add_argument("--delta", type=int, choices=(-1, 1), default=1)
    p.add_argument("--eps-sign", type=int, choices=(-1, 1), default=1)
    p.add_argument("--grid", type=int, default=2001)
    common(p, "csv")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("verify", help="closed-form verification suite")
    p.add_argument("--suite", default="all",
                   choices=("all", "operators", "factorization", "wronskian", "cross", "j0"))
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--mass", default="0")
    p.add_argument("--lambda", dest="lam", type=int, choices=(-1, 1), default=1)
    common(p, "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="shooting-method eigenvalues")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--mass", default="0")
    p.add_argument("--lambda", dest="lam", type=int, choices=(-1, 1), default=1)
    p.add_argument("--eps-min", type=float, default=0.1)
    p.add_argument("--eps-max", type=float, default=5.0)
    p.add_argument("--eps-step", type=float, default=0.02)
    p.add_argument("--r-offset", type=float, default=1e-3)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--compare", action="store_true",
                   help="match against the closed-form spectra; exit 1 on mismatch")
    common(p, "json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("degeneracy", help="j-shifted twin level map")
    p.add_argument("--j-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    common(p, "csv")
    p.set_defaults(func=cmd_degeneracy)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args, remaining = ap.parse_known_args(argv)
    if remaining:
        ap.error(f"unrecognized arguments: {' '.join(remaining)}")
    if args.config:
        defaults = _load_config(args.config)
        # Flags win: re-parse with config values as defaults.
        sub_ap = build_parser()
        for action in sub_ap._subparsers._group_actions[0].choices[args.command]._actions:
            if action.dest in defaults:
                raw = defaults[action.dest]
                if action.const is not None and not action.type:  # store_true flags
                    action.default = raw.lower() in ("1", "true", "yes")
                else:
                    action.default = action.type(raw) if action.type else raw
        args = sub_ap.parse_args(argv)
    if args.command == "spectrum":
        if args.family == "dirac":
            if args.J is None:
                ap.error("--J is required for the dirac family")
            args.J = Fraction(args.J)
        elif args.family in ("f1", "f2", "f3", "f4", "all-dk"):
            if args.family != "all-dk" and args.j is None:
                ap.error(f"--j is required for family {args.family}")
    try:
        return args.func(args)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"dkradial: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
