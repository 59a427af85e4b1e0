"""Randomized and exhaustive verification suites.

Four suites back the `verify` subcommand and the acceptance tests:

* identity_suite: the two multinomial/Krawtchouk identities, exhaustive
  over small dimensions, trial counts and degrees.
* smoothing_suite: the five smoothing inequalities on seeded random
  instances.
* zero_sum_suite: the elementary-symmetric norm inequalities for
  zero-sum families, plus the scalar auxiliary inequality.
* dominance_suite: every applicable bound must dominate the exact
  distance on seeded random one-dimensional scenarios and on the
  standard table scenarios.

All randomness is drawn from an explicit seed recorded in the result.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .bounds import (
    CategoricalFamily,
    bernoulli_two_sided,
    chained_mean_bound,
    eta_categorical,
    eta_chi2_tv,
    eta_exact,
    expansion_bound_simple,
    pair_determinant_bound,
    per_category_bounds,
    smoothing_bound,
    zero_sum_product_checks,
)
from .expansion import exact_distance, expansion_input, mean_measure
from .krawtchouk import (
    FiniteRandomVector,
    MultinomialParams,
    difference_identity_tables,
    krawtchouk_pair_sum,
    multi_indices,
    multi_indices_upto,
    verify_chi2_smoothing,
    verify_coeff_smoothing,
    verify_compound_smoothing,
    verify_moment_smoothing,
    verify_shifted_smoothing,
)
from .measure import SignedMeasure, linear_combine, tv_norm
from .scenarios import ScenarioSpec, family_for, to_integer_line

DEFAULT_SEED = 20240803


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        seed = f", seed={self.seed}" if self.seed is not None else ""
        return (
            f"[{status}] {self.name}: {self.checks} checks, "
            f"{len(self.failures)} failures{seed} ({self.seconds:.2f}s)"
        )


# ---------------------------------------------------------------------------
# random generators


def random_prob_measure(rng: random.Random, span: int = 4, lo: int = 0) -> SignedMeasure:
    """A random probability measure with full support on lo..lo+span-1."""
    raw = [rng.uniform(0.05, 1.0) for _ in range(span)]
    total = math.fsum(raw)
    return SignedMeasure(1, {(lo + i,): w / total for i, w in enumerate(raw)})


def random_family_matrix(rng: random.Random, n: int, d: int) -> np.ndarray:
    p = np.empty((n, d + 1))
    for j in range(n):
        raw = np.array([rng.uniform(0.05, 1.0) for _ in range(d + 1)])
        p[j] = raw / raw.sum()
    return p


def _random_params(rng: random.Random, d: int) -> MultinomialParams:
    raw = [rng.uniform(0.1, 1.0) for _ in range(d + 1)]
    total = math.fsum(raw)
    return MultinomialParams(n=0, p=tuple(w / total for w in raw[1:]))


def _random_signed_on(rng: random.Random, g: SignedMeasure, scale: float) -> SignedMeasure:
    atoms = {pt: rng.uniform(-scale, scale) for pt in g.support()}
    return SignedMeasure(1, atoms)


def _center(u: SignedMeasure) -> SignedMeasure:
    """Shift mass at the first support point so the total mass is zero."""
    from .measure import total_mass

    pts = sorted(u.support())
    if not pts:
        return u
    atoms = dict(u.items())
    atoms[pts[0]] = atoms.get(pts[0], 0.0) - total_mass(u)
    return SignedMeasure(1, atoms)


# ---------------------------------------------------------------------------
# suites


def identity_suite(d_max: int = 3, n_max: int = 8, v_max: int = 3, tol: float = 1e-10) -> SuiteResult:
    """Exhaustive check of the pair-sum and difference identities."""
    t0 = time.perf_counter()
    res = SuiteResult("krawtchouk identities")
    rng = random.Random(97)
    for d in range(1, d_max + 1):
        params_pool = [_random_params(rng, d) for _ in range(2)]
        for n in range(1, n_max + 1):
            for params0 in params_pool:
                params = MultinomialParams(n=n, p=params0.p)
                # quadratic-form identity over all equal-order pairs
                for k in range(1, v_max + 1):
                    vs = multi_indices(d, k)
                    for v in vs:
                        for vt in vs:
                            lhs, rhs = krawtchouk_pair_sum(v, vt, params)
                            res.checks += 1
                            if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                                res.failures.append(
                                    f"pair_sum d={d} n={n} v={v} vt={vt}: {lhs} vs {rhs}"
                                )
                # difference identity, pointwise on the whole grid
                for v in multi_indices_upto(d, v_max):
                    if sum(v) == 0:
                        continue
                    for w, (lhs, rhs) in difference_identity_tables(v, params).items():
                        res.checks += 1
                        if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                            res.failures.append(
                                f"difference d={d} n={n} v={v} w={w}: {lhs} vs {rhs}"
                            )
    res.seconds = time.perf_counter() - t0
    return res


def smoothing_suite(seed: int = DEFAULT_SEED, instances: int = 200) -> SuiteResult:
    """The five smoothing inequalities on seeded random instances."""
    t0 = time.perf_counter()
    res = SuiteResult("smoothing inequalities", seed=seed)
    rng = random.Random(seed)

    for i in range(instances):
        # coefficient form
        d = rng.randint(1, 2)
        k = rng.randint(1, 3)
        params = _random_params(rng, d)
        atoms = [random_prob_measure(rng, span=rng.randint(1, 3)) for _ in range(d + 1)]
        coeffs = {v: rng.uniform(-1.0, 1.0) for v in multi_indices(d, k)}
        rec = verify_coeff_smoothing(coeffs, atoms, params, n=rng.randint(0, 20))
        res.checks += 1
        if not rec.ok:
            res.failures.append(f"coeff #{i}: {rec.lhs} > {rec.rhs}")

        # moment form
        d = rng.randint(1, 2)
        k = rng.randint(1, 3)
        params = _random_params(rng, d)
        atoms = [random_prob_measure(rng, span=rng.randint(1, 3)) for _ in range(d + 1)]
        pts = rng.randint(2, 4)
        raw = [rng.uniform(0.1, 1.0) for _ in range(pts)]
        tot = math.fsum(raw)
        support = tuple(
            (tuple(rng.uniform(-1.0, 1.0) for _ in range(d)), wgt / tot) for wgt in raw
        )
        rec = verify_moment_smoothing(
            FiniteRandomVector(support), atoms, params, n=rng.randint(0, 12), k=k
        )
        res.checks += 1
        if not rec.ok:
            res.failures.append(f"moment #{i}: {rec.lhs} > {rec.rhs}")

        # chi-square form
        g = random_prob_measure(rng, span=6)
        f = random_prob_measure(rng, span=rng.randint(2, 6))
        rec = verify_chi2_smoothing(f - g, g, n=rng.randint(0, 50), k=rng.randint(1, 3))
        res.checks += 1
        if not rec.ok:
            res.failures.append(f"chi2 #{i}: {rec.lhs} > {rec.rhs}")

        # shifted form; pin one atom of each sign so both parts are nonzero
        g = random_prob_measure(rng, span=6)
        pts = sorted(g.support())
        atoms = {pt: rng.uniform(-0.5, 0.5) for pt in pts}
        atoms[pts[0]] = -abs(atoms[pts[0]]) - 0.01
        atoms[pts[1]] = abs(atoms[pts[1]]) + 0.01
        u2 = SignedMeasure(1, atoms)
        u1 = SignedMeasure(1, {(rng.randint(0, 5),): rng.uniform(-0.5, 0.5)})
        rec = verify_shifted_smoothing(u1, u2, g, n=rng.randint(0, 50))
        res.checks += 1
        if not rec.ok:
            res.failures.append(f"shifted #{i}: {rec.lhs} > {rec.rhs}")
        res.checks += 1
        if rec.extras["simplified_lhs"] > rec.extras["simplified_rhs"] + 1e-10:
            res.failures.append(f"shifted-simplified #{i}")

        # compound form
        g = random_prob_measure(rng, span=5)
        f = random_prob_measure(rng, span=rng.randint(2, 5))
        rec = verify_compound_smoothing(
            f - g, g, t=rng.uniform(0.5, 4.0), k=rng.randint(1, 3)
        )
        res.checks += 1
        if not rec.ok:
            res.failures.append(f"compound #{i}: {rec.lhs} > {rec.rhs}")

    res.seconds = time.perf_counter() - t0
    return res


def zero_sum_suite(seed: int = DEFAULT_SEED, families: int = 100, n: int = 8) -> SuiteResult:
    """Elementary-symmetric norm inequalities plus the scalar auxiliary."""
    t0 = time.perf_counter()
    res = SuiteResult("zero-sum symmetric norms", seed=seed)
    rng = random.Random(seed)
    for i in range(families):
        fs = [random_prob_measure(rng, span=rng.randint(2, 4)) for _ in range(n)]
        fbar = mean_measure(fs)
        ls = [f - fbar for f in fs]
        report = zero_sum_product_checks(ls)
        res.checks += len(report.checks)
        for chk in report.checks:
            if not chk.ok:
                res.failures.append(f"family #{i} order {chk.k}: {chk.lhs} > {chk.rhs}")
        # auxiliary: (theta3^2 - theta6) / theta2^3 <= 1/4 for any norms
        norms = [rng.uniform(0.0, 2.0) for _ in range(rng.randint(3, 10))]
        t2 = math.fsum(x**2 for x in norms)
        t3 = math.fsum(x**3 for x in norms)
        t6 = math.fsum(x**6 for x in norms)
        res.checks += 1
        if t2 > 0 and (t3 * t3 - t6) / t2**3 > 0.25 + 1e-12:
            res.failures.append(f"auxiliary ratio #{i}")
    res.seconds = time.perf_counter() - t0
    return res


def _dominance_candidates(
    fam: CategoricalFamily, inp, ell: int, use_exact_eta: bool
) -> Dict[str, Optional[float]]:
    """Applicable upper bounds for the distance to the order-ell approximant."""
    out: Dict[str, Optional[float]] = {}
    eta_cat = eta_categorical(fam, ell).eta
    b = expansion_bound_simple(eta_cat, ell)
    out["expansion(categorical eta)"] = b.value if b.applicable else None
    if ell <= 3:
        out["chained(categorical eta)"] = chained_mean_bound(eta_cat, ell).value
    out["smoothing_mean(categorical eta)"] = smoothing_bound(eta_cat, ell, mean_centered=True).value
    eta0 = eta_chi2_tv(inp, 0).eta
    out["smoothing(eta0 estimate)"] = smoothing_bound(eta0, ell).value
    if use_exact_eta:
        eta1x = eta_exact(inp, ell).eta
        eta0x = eta_exact(inp, 0).eta
        b = expansion_bound_simple(eta1x, ell)
        out["expansion(exact eta)"] = b.value if b.applicable else None
        if ell <= 3:
            out["chained(exact eta)"] = chained_mean_bound(eta1x, ell).value
        out["smoothing_mean(exact eta)"] = smoothing_bound(eta1x, ell, mean_centered=True).value
        out["smoothing(exact eta0)"] = smoothing_bound(eta0x, ell).value
    pd = pair_determinant_bound(fam)
    out["pair_determinant"] = pd.value if pd.applicable else None
    pc = per_category_bounds(fam)
    out["per_category"] = pc.quadratic.value
    out["per_category_refined"] = pc.refined.value if pc.refined.applicable else None
    out["per_category_magic"] = pc.magic_factor.value
    out["per_category_magic_improved"] = pc.magic_factor_improved.value
    return out


def dominance_suite(
    seed: int = DEFAULT_SEED,
    instances: int = 200,
    include_tables: bool = True,
    tol: float = 1e-12,
) -> SuiteResult:
    """Every applicable bound dominates the exact distance (ell = 1)."""
    t0 = time.perf_counter()
    res = SuiteResult("bound dominance", seed=seed)
    rng = random.Random(seed)

    for i in range(instances):
        d = rng.randint(1, 4)
        n = rng.randint(2, 30)
        fam = CategoricalFamily(random_family_matrix(rng, n, d))
        inp = to_integer_line(fam)
        exact = exact_distance(inp, 1)
        cands = _dominance_candidates(fam, inp, 1, use_exact_eta=True)
        if fam.d == 1:
            lower, upper = bernoulli_two_sided(fam)
            cands["two_sided_upper"] = upper
            res.checks += 1
            if lower > exact + tol:
                res.failures.append(f"instance #{i}: two-sided lower {lower} > exact {exact}")
        for name, value in cands.items():
            if value is None:
                continue
            res.checks += 1
            if value + tol < exact:
                res.failures.append(f"instance #{i}: {name} {value} < exact {exact}")

    if include_tables:
        specs = [
            ScenarioSpec("example3_binomial", n, a=a)
            for (n, a) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]
        ] + [
            ScenarioSpec("example3_linear", n, b=b)
            for (n, b) in [(100, 1), (1000, 1), (100, 2), (1000, 2)]
        ]
        for spec in specs:
            fam = family_for(spec)
            inp = to_integer_line(fam)
            exact = exact_distance(inp, spec.ell)
            cands = _dominance_candidates(fam, inp, spec.ell, use_exact_eta=False)
            for name, value in cands.items():
                if value is None:
                    continue
                res.checks += 1
                if value + tol < exact:
                    res.failures.append(f"{spec.label}: {name} {value} < exact {exact}")

    res.seconds = time.perf_counter() - t0
    return res


def run_all(seed: int = DEFAULT_SEED, instances: int = 200) -> List[SuiteResult]:
    return [
        identity_suite(),
        smoothing_suite(seed=seed, instances=instances),
        zero_sum_suite(seed=seed),
        dominance_suite(seed=seed, instances=instances),
    ]
