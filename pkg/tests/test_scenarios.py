"""Scenario generators and lattice realizations."""

import math
import random

import numpy as np
import pytest

from convclose.expansion import exact_distance, exact_product, expansion_input
from convclose.measure import linear_combine, tv_norm
from convclose.scenarios import (
    ScenarioSpec,
    family_for,
    gen_example1,
    gen_example2,
    gen_symmetric,
    symmetric_to_input,
    to_integer_line,
    to_unit_vectors,
    with_atoms,
)
from convclose.suites import random_family_matrix
from convclose.bounds import CategoricalFamily
from helpers import rand_prob


TABLE2 = [0.00416, 0.03012, 0.09851, 0.19175, 0.24611, 0.21781,
          0.13473, 0.05757, 0.01628, 0.00276, 0.00021]
TABLE4 = [0.08807, 0.08864, 0.08921, 0.08978, 0.09034, 0.09091,
          0.09148, 0.09204, 0.09261, 0.09318, 0.09374]


class TestExample1:
    def test_mean_probabilities_spot(self):
        fam = gen_example1(100, 1)
        for r, printed in enumerate(TABLE2):
            assert abs(fam.pbar[r] - printed) < 0.5e-5 * 1.001

    def test_rows_sum_to_one(self):
        fam = gen_example1(50, 2)
        assert np.max(np.abs(fam.p.sum(axis=1) - 1.0)) < 1e-12

    def test_success_probability_range(self):
        for n, a in ((100, 1), (20, 3)):
            for j in range(1, n + 1):
                q = 0.4 + (j + 9) ** (-a)
                assert 0.4 < q <= 0.5

    def test_binomial_rows(self):
        fam = gen_example1(3, 1, d=4)
        q1 = 0.4 + 0.1
        for r in range(5):
            assert fam.p[0, r] == pytest.approx(
                math.comb(4, r) * q1**r * (1 - q1) ** (4 - r), rel=1e-14
            )

    def test_parameter_guards(self):
        with pytest.raises(ValueError):
            gen_example1(0, 1)
        with pytest.raises(ValueError):
            gen_example1(10, 0.5)


class TestExample2:
    def test_mean_probabilities_spot(self):
        fam = gen_example2(100, 1)
        for r, printed in enumerate(TABLE4):
            assert abs(fam.pbar[r] - printed) < 0.5e-5 * 1.001

    def test_rows_sum_to_one(self):
        fam = gen_example2(30, 1)
        assert np.max(np.abs(fam.p.sum(axis=1) - 1.0)) < 1e-12

    def test_mean_increasing_in_category(self):
        fam = gen_example2(100, 1)
        assert all(a < b for a, b in zip(fam.pbar, fam.pbar[1:]))

    def test_displayed_ratio(self):
        n, b, d = 7, 2, 3
        fam = gen_example2(n, b, d=d)
        j, r = 3, 2
        num = 1.0 + (j + r) / (b * (n + d))
        den = math.fsum(1.0 + (j + r1) / (b * (n + d)) for r1 in range(d + 1))
        assert fam.p[j - 1, r] == pytest.approx(num / den, rel=1e-14)


class TestSymmetric:
    def test_row_constraint(self):
        sym = gen_symmetric(12, shape=2.0, b=4)
        total = sym.p[:, 0] + 2.0 * sym.p[:, 1:].sum(axis=1)
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_measures_are_symmetric_probabilities(self):
        sym = gen_symmetric(5, b=3)
        for f in sym.to_measures():
            assert tv_norm(f) == pytest.approx(1.0, abs=1e-12)
            for (x,), m in f.items():
                assert f.mass(-x) == pytest.approx(m, abs=0)

    def test_exact_distance_runs(self):
        inp = symmetric_to_input(gen_symmetric(6, b=2))
        assert exact_distance(inp, 1) >= 0.0


class TestRealizations:
    def test_integer_line_support(self):
        fam = gen_example1(20, 1)
        inp = to_integer_line(fam)
        prod = exact_product(inp.fs)
        assert all(0 <= p[0] <= 10 * 20 for p in prod.support())

    def test_example3_support_n100(self):
        fam = gen_example1(100, 1)
        prod = exact_product(to_integer_line(fam).fs)
        assert all(0 <= p[0] <= 1000 for p in prod.support())

    def test_unit_vectors_dimension(self):
        fam = gen_example1(5, 1, d=4)
        inp = to_unit_vectors(fam)
        assert inp.dim == 4
        assert tv_norm(inp.fs[0]) == pytest.approx(1.0, abs=1e-12)

    def test_with_atoms_matches_unit_vectors(self):
        rng = random.Random(80)
        fam = CategoricalFamily(random_family_matrix(rng, 4, 2))
        from convclose.measure import delta

        atoms = [delta((0, 0)), delta((1, 0)), delta((0, 1))]
        a = with_atoms(fam, atoms)
        b = to_unit_vectors(fam)
        for fa, fb in zip(a.fs, b.fs):
            assert tv_norm(fa - fb) < 1e-14

    def test_lattice_realization_dominates_arbitrary_atoms(self):
        # the unit-vector realization is extremal for the product-vs-mean
        # distance; any other atom assignment can only decrease it
        rng = random.Random(81)
        for _ in range(10):
            n, d = rng.randint(2, 4), rng.randint(1, 2)
            fam = CategoricalFamily(random_family_matrix(rng, n, d))
            atoms = [rand_prob(rng, span=2) for _ in range(d + 1)]
            abstract = with_atoms(fam, atoms)
            lattice = to_unit_vectors(fam)
            dist_abstract = tv_norm(
                exact_product(abstract.fs) - (abstract.g ** n)
            )
            dist_lattice = tv_norm(exact_product(lattice.fs) - (lattice.g ** n))
            assert dist_abstract <= dist_lattice + 1e-10


class TestSpec:
    def test_labels(self):
        spec = ScenarioSpec("example1", 100, a=1)
        assert spec.label == "example1[n=100,a=1]"

    def test_validation(self):
        with pytest.raises(ValueError):
            ScenarioSpec("example1", 100)  # missing a
        with pytest.raises(ValueError):
            ScenarioSpec("example2", 100, b=0.5)
        with pytest.raises(ValueError):
            ScenarioSpec("nope", 100)
        with pytest.raises(ValueError):
            ScenarioSpec("example1", 0, a=1)

    def test_family_for(self):
        assert family_for(ScenarioSpec("example3_binomial", 10, a=2)).n == 10
        with pytest.raises(ValueError):
            family_for(ScenarioSpec("symmetric", 10))
