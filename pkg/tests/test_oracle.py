import math

import numpy as np
import pytest

from dkradial.closedform import Family, family_levels, spectrum
from dkradial.oracle import (
    OracleEigenvalue,
    ShootingConfig,
    compare_spectra,
    shoot_j,
    shoot_j0,
)

J0_CFG = ShootingConfig(eps_scan=(0.2, 4.0, 0.05))


class TestShootJ0:
    def test_massless_levels(self):
        evs = shoot_j0(0.0, +1, J0_CFG)
        expect = [math.sqrt((2 + n) ** 2 - 1) for n in range(3)]
        assert len(evs) == 3
        for ev, ex in zip(evs, expect):
            assert abs(ev.eps - ex) / ex < 1e-6

    def test_massive_lowest(self):
        evs = shoot_j0(1.0, +1, ShootingConfig(eps_scan=(1.2, 2.4, 0.05)))
        assert len(evs) == 1
        assert abs(evs[0].eps - 2.0) < 1e-6

    def test_empty_scan_range(self):
        assert shoot_j0(0.0, +1, ShootingConfig(eps_scan=(0.1, 1.0, 0.05))) == []

    def test_node_counts_order_levels(self):
        evs = shoot_j0(0.0, +1, ShootingConfig(eps_scan=(0.2, 5.0, 0.05)))
        assert [ev.node_count for ev in evs] == list(range(len(evs)))

    def test_lambda_branch_immaterial_at_zero_mass(self):
        a = shoot_j0(0.0, +1, J0_CFG)
        b = shoot_j0(0.0, -1, J0_CFG)
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert x.eps == pytest.approx(y.eps, abs=1e-12)


class TestShootJ:
    def test_j1_levels_and_no_phantom(self):
        cfg = ShootingConfig(eps_scan=(0.3, 4.3, 0.02))
        evs = shoot_j(0.0, 1, +1, cfg)
        got = sorted(ev.p_sq for ev in evs)
        assert np.allclose(got, [3.0, 4.0, 8.0, 9.0, 15.0, 16.0], rtol=1e-6)
        # nothing at p^2 = j^2 = 1: the family-iii formula's n=0 entry
        assert all(abs(p - 1.0) > 0.5 for p in got)

    def test_j0_rejected(self):
        with pytest.raises(ValueError):
            shoot_j(0.0, 0)

    def test_shifted_runs_share_degenerate_values(self):
        # F2(j+1, n) = F1(j, n) and F3(j+1, n) = F4(j, n): the j=2 run must
        # reproduce the matching j=1 values.
        evs1 = shoot_j(0.0, 1, +1, ShootingConfig(eps_scan=(0.3, 4.3, 0.02)))
        evs2 = shoot_j(0.0, 2, +1, ShootingConfig(eps_scan=(0.3, 4.3, 0.02)))
        p1 = {round(ev.p_sq, 6) for ev in evs1}
        p2 = {round(ev.p_sq, 6) for ev in evs2}
        # j=1: F1(n=0) = 8 appears at j=2 as F2(n=0); F4(j=1,n=0) = 4 appears
        # at j=2 as F3... F3(2,n) starts at n=1 -> 16; shared here: {8, 9, 15, 16}
        shared = p1 & p2
        for want in (8.0, 9.0, 15.0, 16.0):
            assert any(abs(s - want) < 1e-5 for s in shared)

    def test_discretization_independence(self):
        cfg = ShootingConfig(eps_scan=(2.7, 2.95, 0.02))
        base = shoot_j(0.0, 1, +1, cfg)
        assert len(base) == 1  # sqrt(8)
        halved = shoot_j(0.0, 1, +1, ShootingConfig(
            eps_scan=(2.7, 2.95, 0.02), r_start_offset=cfg.r_start_offset / 2))
        moved = shoot_j(0.0, 1, +1, ShootingConfig(
            eps_scan=(2.7, 2.95, 0.02), match_point=math.pi / 3))
        assert abs(halved[0].eps - base[0].eps) < 1e-9
        assert abs(moved[0].eps - base[0].eps) < 1e-9

    def test_j0_pendant_discretization_independence(self):
        cfg = ShootingConfig(eps_scan=(1.6, 1.85, 0.05))
        base = shoot_j0(0.0, +1, cfg)
        halved = shoot_j0(0.0, +1, ShootingConfig(
            eps_scan=(1.6, 1.85, 0.05), r_start_offset=cfg.r_start_offset / 2))
        assert abs(base[0].eps - halved[0].eps) < 1e-9


class TestCompare:
    def test_full_match(self):
        cfg = ShootingConfig(eps_scan=(0.3, 4.3, 0.02))
        evs = shoot_j(0.0, 1, +1, cfg)
        closed = [e for e in family_levels(1, 2, 0) if math.sqrt(float(e.eps_sq)) <= 4.3]
        cmp = compare_spectra(evs, closed)
        assert cmp.passed
        fams = {(c.family, c.n) for _, c, _ in cmp.matched}
        assert (Family.F3, 1) in fams and (Family.F3, 0) not in fams

    def test_empty_oracle_reports_all_closed_unmatched(self):
        closed = [spectrum(Family.F1, 1, n, 0) for n in range(3)]
        cmp = compare_spectra([], closed)
        assert not cmp.passed
        assert len(cmp.unmatched_closed) == 3

    def test_extra_oracle_value_flagged(self):
        fake = OracleEigenvalue(eps=1.23, p_sq=1.23**2, j=1, bracket=(1.2, 1.25))
        cmp = compare_spectra([fake], [])
        assert not cmp.passed and cmp.unmatched_oracle == [fake]


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ShootingConfig(r_start_offset=2.0)
        with pytest.raises(ValueError):
            ShootingConfig(eps_scan=(3.0, 1.0, 0.1))
