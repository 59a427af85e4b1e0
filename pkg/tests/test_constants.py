"""Explicit constants: maxima, roots, crossings."""

import math

import pytest

from convclose.constants import (
    U_PUBLISHED,
    UTILDE_PUBLISHED,
    bisect,
    compute_c1,
    constants_table,
    h,
    h_derivative_sign,
    s_ell,
    u_ell,
    utilde_ell,
    x_ell,
    xtilde_ell,
    zeta_ell,
)


class TestC1:
    def test_bracket(self):
        c1, x0 = compute_c1()
        assert 0.694025 <= c1 < 0.694026
        assert 0.936219 <= x0 < 0.936220

    def test_local_maximum(self):
        c1, x0 = compute_c1()
        assert h(x0 - 1e-4) < h(x0)
        assert h(x0 + 1e-4) < h(x0)
        assert h(x0) == pytest.approx(c1, abs=0)

    def test_derivative_sign_flips_at_x0(self):
        _, x0 = compute_c1()
        assert h_derivative_sign(x0 - 1e-3) > 0
        assert h_derivative_sign(x0 + 1e-3) < 0


class TestRoots:
    @pytest.mark.parametrize("ell", range(0, 9))
    def test_x_ell_residual(self, ell):
        x = x_ell(ell)
        assert 0 < x < 1
        assert abs(x ** (ell + 1) + 0.5 * x - 1.0) < 1e-11

    @pytest.mark.parametrize("ell", range(1, 9))
    def test_xtilde_ell_residual(self, ell):
        x = xtilde_ell(ell)
        assert 0 < x < 1
        assert abs(x ** (ell + 1) - 0.5 * x * x + x - 1.0) < 1e-11

    def test_x0_closed_form(self):
        # x + x/2 = 1 at order zero
        assert x_ell(0) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_bisect_needs_sign_change(self):
        with pytest.raises(ValueError):
            bisect(lambda x: 1.0 + x * x, 0.0, 1.0)


class TestSmoothingConstants:
    def test_published_upper_bounds(self):
        for ell, pub in U_PUBLISHED.items():
            val = u_ell(ell)
            assert val <= pub
            assert val > pub - 0.1  # the published value is the round-up

    def test_mean_centered_published(self):
        assert utilde_ell(1) <= 10.94 and utilde_ell(1) > 10.93
        assert utilde_ell(2) <= 31.5 and utilde_ell(2) > 31.4
        assert utilde_ell(3) <= 82.2 and utilde_ell(3) > 82.1

    def test_crossing_points(self):
        # printed values are truncations of the crossing points
        for ell, printed in ((1, 0.182839), (2, 0.196439), (3, 0.205094)):
            s = s_ell(ell)
            assert printed <= s < printed + 1e-6

    def test_mean_centered_definition(self):
        for ell in (1, 2, 3):
            s = s_ell(ell)
            assert utilde_ell(ell) == pytest.approx(
                zeta_ell(ell, s) / s ** ((ell + 1) / 2.0), rel=1e-14
            )

    def test_large_order_route(self):
        from convclose.constants import two_e_c1

        for ell in (4, 6):
            expected = two_e_c1() ** ((ell + 1) / 2.0) / (1.0 - xtilde_ell(ell))
            assert utilde_ell(ell) == pytest.approx(expected, rel=1e-14)

    def test_ell_zero_rejected_for_mean_centered(self):
        with pytest.raises(ValueError):
            utilde_ell(0)

    def test_monotone_growth(self):
        vals = [u_ell(ell) for ell in range(6)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_sharp_below_coarse_route(self):
        from convclose.constants import two_e_c1

        for ell in (1, 2, 3):
            coarse = two_e_c1() ** ((ell + 1) / 2.0) / (1.0 - xtilde_ell(ell))
            assert utilde_ell(ell) < coarse


class TestTable:
    def test_constants_table_fields(self):
        tab = constants_table(5)
        assert set(tab.s_ell) == {1, 2, 3}
        assert set(tab.u_ell) == set(range(6))
        assert tab.c1 == compute_c1()[0]

    def test_published_dicts_are_roundups(self):
        assert UTILDE_PUBLISHED[2] == 31.5
        assert U_PUBLISHED[0] == 5.9
