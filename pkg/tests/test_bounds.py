"""Eta machinery, the bounds, and the comparators."""

import math
import random

import numpy as np
import pytest

from convclose.bounds import (
    PER_CATEGORY_LEAD,
    BoundResult,
    CategoricalFamily,
    EtaReport,
    SymmetricFamily,
    WorkloadExceeded,
    bernoulli_two_sided,
    chained_mean_bound,
    eta_categorical,
    eta_chi2_tv,
    eta_chi2_tv_mean,
    eta_exact,
    eta_symmetric,
    expansion_bound,
    expansion_bound_simple,
    pair_determinant_bound,
    per_category_bounds,
    smoothing_bound,
    zero_sum_product_checks,
)
from convclose.constants import two_e_c1, u_ell, utilde_ell
from convclose.expansion import exact_distance, expansion_input, mean_measure
from convclose.measure import SignedMeasure, delta, linear_combine, tv_norm
from convclose.scenarios import to_integer_line
from convclose.suites import random_family_matrix
from helpers import rand_prob


def two_point_input():
    return expansion_input([delta(0), delta(1)])


class TestEtaExact:
    def test_identical_factors(self):
        rng = random.Random(40)
        g = rand_prob(rng)
        inp = expansion_input([g] * 4, g)
        for ell in (0, 1, 2):
            assert eta_exact(inp, ell).eta == 0.0

    def test_hand_case_two_points(self):
        inp = two_point_input()
        rep = eta_exact(inp, 1)
        assert rep.eta == pytest.approx(1.0, abs=1e-14)
        assert rep.per_k[2] == (pytest.approx(2.0), pytest.approx(0.0, abs=1e-14))
        # ell = 0 brings in k = 1 with the mean-smoothed difference of norm 1/2
        rep0 = eta_exact(inp, 0)
        assert rep0.per_k[1][0] == pytest.approx(0.5, abs=1e-14)
        assert rep0.eta == pytest.approx(1.0, abs=1e-14)
        # alpha = 1 divides by k^2
        rep11 = eta_exact(inp, 1, alpha=1.0)
        assert rep11.eta == pytest.approx(0.5, abs=1e-14)

    def test_estimates_dominate_exact(self):
        rng = random.Random(41)
        for _ in range(50):
            n = rng.randint(2, 12)
            fs = [rand_prob(rng, span=3) for _ in range(n)]
            inp = expansion_input(fs)
            exact = eta_exact(inp, 1).eta
            assert eta_chi2_tv_mean(inp, 1).eta >= exact - 1e-12
            assert eta_chi2_tv(inp, 1).eta >= exact - 1e-12

    def test_workload_guard(self):
        rng = random.Random(42)
        inp = expansion_input([rand_prob(rng, span=4) for _ in range(40)])
        with pytest.raises(WorkloadExceeded):
            eta_exact(inp, 1, max_ops=50)

    def test_report_validation(self):
        with pytest.raises(ValueError):
            EtaReport(eta=-1.0, ell=1, alpha=0.0, method="exact")


class TestEtaEstimates:
    def test_general_reduces_to_mean_form(self):
        rng = random.Random(43)
        inp = expansion_input([rand_prob(rng) for _ in range(5)])
        a = eta_chi2_tv(inp, 2).eta
        b = eta_chi2_tv_mean(inp, 2).eta
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)

    def test_all_equal_gives_zero(self):
        rng = random.Random(44)
        g = rand_prob(rng)
        inp = expansion_input([g] * 5, g)
        # the recomputed mean leaves 1-ulp density dust, nothing more
        assert eta_chi2_tv(inp, 1).eta == pytest.approx(0.0, abs=1e-30)

    def test_categorical_identical_rows(self):
        p = np.full((10, 4), 0.25)
        assert eta_categorical(CategoricalFamily(p), 1).eta == 0.0

    def test_categorical_matches_mean_form_on_distinct_atoms(self):
        # with atoms at distinct lattice points the two estimates coincide
        rng = random.Random(45)
        for _ in range(10):
            fam = CategoricalFamily(random_family_matrix(rng, rng.randint(2, 8), rng.randint(1, 3)))
            inp = to_integer_line(fam)
            a = eta_categorical(fam, 1).eta
            b = eta_chi2_tv_mean(inp, 1).eta
            assert a == pytest.approx(b, rel=1e-10)

    def test_categorical_dominates_mean_form_on_overlapping_atoms(self):
        # when the atoms share support the category-matrix estimate can
        # only be coarser than the measure-level one
        rng = random.Random(145)
        from convclose.scenarios import with_atoms
        from helpers import rand_prob_full, rand_prob_on

        for _ in range(10):
            fam = CategoricalFamily(random_family_matrix(rng, rng.randint(2, 6), 2))
            base = rand_prob_full(rng, span=4)
            atoms = [rand_prob_on(rng, base.support()) for _ in range(3)]
            inp = with_atoms(fam, atoms)
            a = eta_categorical(fam, 1).eta
            b = eta_chi2_tv_mean(inp, 1).eta
            assert a >= b - 1e-12

    def test_magic_factor_column_inequality(self):
        # dropping the r=0 column against pbar_0 only enlarges the sum
        rng = random.Random(46)
        for _ in range(20):
            fam = CategoricalFamily(random_family_matrix(rng, rng.randint(2, 10), rng.randint(2, 5)))
            p, pbar, n = fam.p, fam.pbar, fam.n
            for j in range(n):
                diff = pbar - p[j]
                lhs = float((diff**2 / (n * pbar)).sum())
                rhs = float((diff[1:] ** 2 / (n * pbar[1:] * pbar[0])).sum())
                assert lhs <= rhs + 1e-15


class TestEtaSymmetric:
    @staticmethod
    def _sym(rng, n, b=2):
        p = np.empty((n, b + 1))
        for j in range(n):
            raw = np.array([rng.uniform(0.1, 1.0) for _ in range(b + 1)])
            p[j] = raw / (raw[0] + 2.0 * raw[1:].sum())
        return SymmetricFamily(p)

    def test_identical_rows(self):
        p = np.tile(np.array([[0.5, 0.15, 0.1]]), (6, 1))
        assert eta_symmetric(SymmetricFamily(p), 1).eta == pytest.approx(0.0, abs=1e-30)

    def test_dominates_exact_alpha1(self):
        rng = random.Random(47)
        for _ in range(20):
            sym = self._sym(rng, rng.randint(2, 8))
            inp = expansion_input(sym.to_measures())
            exact = eta_exact(inp, 1, alpha=1.0).eta
            assert eta_symmetric(sym, 1).eta >= exact - 1e-12

    def test_first_branch_quarters_when_n_doubles(self):
        rng = random.Random(48)
        sym = self._sym(rng, 4)
        doubled = SymmetricFamily(np.vstack([sym.p, sym.p]))
        # fixed per-row deviations: the quadratic branch scales as n^-2
        def quad_terms(fam):
            p, pbar, n = fam.p, fam.pbar, fam.n
            out = []
            for j in range(n):
                d0 = pbar[0] - p[j, 0]
                dr = pbar[1:] - p[j, 1:]
                out.append(
                    (4.0 / n**2)
                    * (
                        d0 * d0 / (2 * pbar[0] ** 2)
                        + 2 * float((dr**2 / (pbar[1:] * pbar[0])).sum())
                        + float((dr**2 / pbar[1:] ** 2).sum())
                    )
                )
            return out

        q1 = quad_terms(sym)
        q2 = quad_terms(doubled)
        for j in range(sym.n):
            assert q2[j] == pytest.approx(q1[j] / 4.0, rel=1e-12)

    def test_rejects_bad_rows(self):
        with pytest.raises(ValueError):
            SymmetricFamily(np.array([[0.5, 0.5]]))  # 0.5 + 2*0.5 != 1


class TestExpansionBound:
    def test_zero_eta(self):
        assert expansion_bound(0.0, 1).value == 0.0
        assert expansion_bound_simple(0.0, 3).value == 0.0

    def test_threshold(self):
        thr = 1.0 / two_e_c1()
        res = expansion_bound(thr, 1)
        assert not res.applicable
        assert "eta" in res.reason
        assert res.conditions["eta_threshold"] == pytest.approx(thr)
        assert expansion_bound(thr * 0.999, 1).applicable

    def test_alpha_zero_paths_agree(self):
        thr = 1.0 / two_e_c1()
        for ell in (0, 1, 2, 3):
            for frac in (1e-6, 0.01, 0.3, 0.9, 0.999):
                eta = frac * thr
                a = expansion_bound(eta, ell).value
                b = expansion_bound_simple(eta, ell).value
                assert a == pytest.approx(b, rel=1e-14)

    def test_monotone_in_eta(self):
        thr = 1.0 / two_e_c1()
        grid = [frac * thr for frac in np.linspace(1e-4, 0.999, 200)]
        vals = [expansion_bound_simple(e, 1).value for e in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_alpha_one_formula(self):
        eta1, eta11, ell = 0.01, 0.002, 1
        res = expansion_bound(eta1, ell, alpha=1.0, eta_ell_alpha=eta11)
        t = math.sqrt(two_e_c1() * eta1)
        manual = 2 * (two_e_c1() * eta11) / (1 - t) ** 2
        assert res.value == pytest.approx(manual, rel=1e-14)


class TestSmoothingBound:
    def test_zero(self):
        assert smoothing_bound(0.0, 2).value == 0.0

    def test_values(self):
        assert smoothing_bound(0.04, 1).value == pytest.approx(u_ell(1) * 0.04, rel=1e-14)
        assert smoothing_bound(0.04, 2, mean_centered=True).value == pytest.approx(
            utilde_ell(2) * 0.04**1.5, rel=1e-14
        )

    def test_degenerate_cap(self):
        # eta1 <= 2 always, so the mean-centered order-1 bound is <= 2*ut_1 <= 21.88
        res = smoothing_bound(2.0, 1, mean_centered=True)
        assert res.value == pytest.approx(2.0 * utilde_ell(1), rel=1e-14)
        assert res.value <= 21.88

    def test_mean_centered_needs_ell_one(self):
        with pytest.raises(ValueError):
            smoothing_bound(0.1, 0, mean_centered=True)


class TestChainedBound:
    def test_zero(self):
        assert chained_mean_bound(0.0, 1).value == 0.0

    def test_order_one_formula(self):
        eta = 0.03
        assert chained_mean_bound(eta, 1).value == pytest.approx(
            (1.0 + 31.5 * math.sqrt(eta)) * eta, rel=1e-14
        )

    def test_higher_orders(self):
        eta = 0.02
        assert chained_mean_bound(eta, 2).value == pytest.approx(
            (math.sqrt(3.0) + 82.2 * math.sqrt(eta)) * eta**1.5, rel=1e-14
        )
        assert chained_mean_bound(eta, 3).value == pytest.approx(
            (2.0 + utilde_ell(4) * math.sqrt(eta)) * eta**2, rel=1e-14
        )
        with pytest.raises(ValueError):
            chained_mean_bound(eta, 4)


class TestTwoSided:
    def test_identical_rows(self):
        # dyadic masses keep the column means exact
        p = np.tile(np.array([[0.75, 0.25]]), (20, 1))
        assert bernoulli_two_sided(CategoricalFamily(p)) == (0.0, 0.0)

    def test_needs_two_categories(self):
        rng = random.Random(49)
        fam = CategoricalFamily(random_family_matrix(rng, 5, 2))
        with pytest.raises(ValueError):
            bernoulli_two_sided(fam)

    def test_gamma2_matches_direct(self):
        rng = random.Random(50)
        fam = CategoricalFamily(random_family_matrix(rng, 30, 1))
        lower, upper = bernoulli_two_sided(fam)
        gamma2 = math.fsum((fam.pbar[1] - fam.p[j, 1]) ** 2 for j in range(30))
        factor = min(1.0, 1.0 / (30 * fam.pbar[1] * fam.pbar[0]))
        assert upper == pytest.approx(2.0 * gamma2 * factor, rel=1e-12)
        assert lower == pytest.approx(gamma2 / 62.0 * factor, rel=1e-12)

    def test_sandwich_on_random_families(self):
        rng = random.Random(51)
        for _ in range(25):
            n = rng.randint(2, 60)
            fam = CategoricalFamily(random_family_matrix(rng, n, 1))
            lower, upper = bernoulli_two_sided(fam)
            exact = exact_distance(to_integer_line(fam), 1)
            assert lower <= exact + 1e-12
            assert exact <= upper + 1e-12


class TestPairDeterminant:
    def test_identical_rows_give_zero(self):
        # dyadic masses keep the column means exact
        p = np.tile(np.array([[0.5, 0.25, 0.125, 0.125]]), (100, 1))
        res = pair_determinant_bound(CategoricalFamily(p))
        assert res.applicable
        assert res.value == 0.0

    def test_small_n_not_applicable(self):
        p = np.array([[0.4, 0.3, 0.2, 0.1]])
        res = pair_determinant_bound(CategoricalFamily(p))
        assert not res.applicable
        assert "n >= 2" in res.reason

    def test_condition_recorded(self):
        rng = random.Random(52)
        fam = CategoricalFamily(random_family_matrix(rng, 50, 3))
        res = pair_determinant_bound(fam)
        assert {"C1", "C2", "condition"} <= set(res.conditions)


class TestPerCategory:
    def test_lead_constant(self):
        assert PER_CATEGORY_LEAD == pytest.approx(math.e / (2.0 - math.sqrt(3.0)), rel=1e-15)
        assert PER_CATEGORY_LEAD <= 10.15

    def test_identical_rows(self):
        p = np.tile(np.array([[0.25, 0.25, 0.25, 0.25]]), (10, 1))
        pc = per_category_bounds(CategoricalFamily(p))
        assert pc.quadratic.value == 0.0
        assert pc.refined.applicable and pc.refined.value == 0.0
        assert pc.magic_factor.value == 0.0
        assert pc.magic_factor_improved.value == 0.0

    def test_improved_uses_published_constant(self):
        rng = random.Random(53)
        fam = CategoricalFamily(random_family_matrix(rng, 20, 3))
        pc = per_category_bounds(fam)
        ratio = pc.magic_factor_improved.value / pc.magic_factor.value
        assert ratio == pytest.approx(2.0 * 10.94 / (PER_CATEGORY_LEAD * 3), rel=1e-12)

    def test_refined_condition(self):
        # blow up the deviations so the refined branch turns off
        p = np.array([[0.98, 0.01, 0.01], [0.01, 0.98, 0.01], [0.01, 0.01, 0.98]])
        pc = per_category_bounds(CategoricalFamily(p))
        assert not pc.refined.applicable
        assert pc.refined.conditions["s"] >= 1.0


class TestZeroSum:
    def test_all_zero_family(self):
        z = SignedMeasure.zero(1)
        report = zero_sum_product_checks([z] * 8)
        assert report.passed
        assert all(c.lhs == 0.0 and c.rhs == 0.0 for c in report.checks)

    def test_mean_centered_random_families(self):
        rng = random.Random(54)
        for _ in range(10):
            fs = [rand_prob(rng, span=3) for _ in range(8)]
            fbar = mean_measure(fs)
            report = zero_sum_product_checks([f - fbar for f in fs])
            assert report.passed
            assert {c.k for c in report.checks} == {2, 3, 4, 5, 6, 7}

    def test_nonzero_sum_rejected(self):
        with pytest.raises(ValueError):
            zero_sum_product_checks([delta(0), delta(1)])

    def test_auxiliary_ratio(self):
        rng = random.Random(55)
        for _ in range(200):
            norms = [rng.uniform(0.0, 3.0) for _ in range(rng.randint(3, 12))]
            t2 = math.fsum(x**2 for x in norms)
            if t2 == 0.0:
                continue
            t3 = math.fsum(x**3 for x in norms)
            t6 = math.fsum(x**6 for x in norms)
            assert (t3 * t3 - t6) / t2**3 <= 0.25 + 1e-12


class TestBoundResult:
    def test_trivial_flag(self):
        assert BoundResult("x", 2.5).trivial
        assert not BoundResult("x", 1.5).trivial
        assert not BoundResult("x", None, "why").trivial

    def test_family_validation(self):
        with pytest.raises(ValueError):
            CategoricalFamily(np.array([[0.5, 0.4]]))  # row sum != 1
        with pytest.raises(ValueError):
            CategoricalFamily(np.array([[1.0, 0.0], [1.0, 0.0]]))  # pbar_1 = 0
