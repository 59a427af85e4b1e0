"""Multivariate Krawtchouk polynomials and smoothness verification oracles.

Finite differences of the multinomial counting density are Krawtchouk
polynomials times a shifted density; summing the resulting expansions
against atom measures yields the smoothing inequalities that drive the
eta machinery.  This module implements the polynomial, the difference
operator, the pair-sum identity used to evaluate quadratic forms, and
numerical verifiers for each smoothing inequality.  The verifiers return
records instead of raising so suites can aggregate failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from scipy.integrate import quad

from .measure import (
    AbsoluteContinuityViolation,
    SignedMeasure,
    compound,
    convolve,
    delta0,
    fold_convolve,
    is_probability,
    linear_combine,
    negative_part,
    positive_part,
    power,
    total_mass,
    tv_norm,
)

MultiIndex = Tuple[int, ...]


def order(v: MultiIndex) -> int:
    return sum(v)


def mi_factorial(v: MultiIndex) -> float:
    out = 1.0
    for c in v:
        out *= math.factorial(c)
    return out


def gen_binomial(a: float, b: int) -> float:
    """Generalized binomial coefficient: product of (a-m+1)/m, m = 1..b.

    Defined for arbitrary real (possibly negative) upper argument.
    """
    if b < 0:
        return 0.0
    out = 1.0
    for m in range(1, b + 1):
        out *= (a - m + 1) / m
    return out


def multi_indices(d: int, total: int) -> List[MultiIndex]:
    """All v in Z_+^d with |v| = total."""
    if d == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in multi_indices(d - 1, total - first):
            out.append((first,) + rest)
    return out


def multi_indices_upto(d: int, total: int) -> List[MultiIndex]:
    out: List[MultiIndex] = []
    for t in range(total + 1):
        out.extend(multi_indices(d, t))
    return out


def indices_below(v: MultiIndex) -> List[MultiIndex]:
    """All multi-indices vt <= v componentwise."""
    out: List[MultiIndex] = [()]
    for c in v:
        out = [w + (i,) for w in out for i in range(c + 1)]
    return out


@dataclass(frozen=True)
class MultinomialParams:
    """Trial count and category probabilities with positive remainder p0."""

    n: int
    p: Tuple[float, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not self.p or any(not 0.0 < x < 1.0 for x in self.p):
            raise ValueError("each p_r must lie in (0,1)")
        if self.p0 <= 0.0:
            raise ValueError("p0 = 1 - sum(p) must be positive")

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def p0(self) -> float:
        return 1.0 - math.fsum(self.p)


def multinomial_pmf(w: MultiIndex, params: MultinomialParams, n: Optional[int] = None) -> float:
    """Multinomial counting density at w, evaluated in log space.

    A single exponentiation keeps n up to a few thousand overflow-free.
    The trial count defaults to params.n but can be overridden (the
    identities below shift it).
    """
    if n is None:
        n = params.n
    if any(c < 0 for c in w) or order(w) > n:
        return 0.0
    log_val = math.lgamma(n + 1) - math.lgamma(n - order(w) + 1)
    for wr, pr in zip(w, params.p):
        log_val += wr * math.log(pr) - math.lgamma(wr + 1)
    log_val += (n - order(w)) * math.log(params.p0)
    return math.exp(log_val)


def multinomial_pmf_direct(w: MultiIndex, params: MultinomialParams, n: Optional[int] = None) -> float:
    """Direct-space evaluation; cross-check for small n."""
    if n is None:
        n = params.n
    if any(c < 0 for c in w) or order(w) > n:
        return 0.0
    val = float(math.factorial(n)) / (mi_factorial(w) * math.factorial(n - order(w)))
    for wr, pr in zip(w, params.p):
        val *= pr**wr
    return val * params.p0 ** (n - order(w))


@lru_cache(maxsize=1 << 17)
def krawtchouk(v: MultiIndex, w: MultiIndex, n: int, params: MultinomialParams) -> float:
    """The multivariate Krawtchouk polynomial of degree v at w.

    Finite sum over vt <= v with generalized binomial coefficients; the
    upper argument n - |w| may be negative.  Evaluations are memoized:
    the quadratic-form identities hit each (v, w) pair many times.
    """
    p, p0 = params.p, params.p0
    total = 0.0
    for vt in indices_below(v):
        diff = tuple(a - b for a, b in zip(v, vt))
        term = gen_binomial(n - order(w), order(diff)) * math.factorial(order(diff))
        for r in range(len(v)):
            term *= (-p[r]) ** diff[r] / math.factorial(diff[r])
        term *= p0 ** order(vt)
        for r in range(len(v)):
            term *= gen_binomial(w[r], vt[r])
        total += term
    return total


def finite_difference(v: MultiIndex, f: Mapping[MultiIndex, float]) -> Dict[MultiIndex, float]:
    """Iterated differences (D_r f)(w) = f(w - e_r) - f(w), applied v_r times.

    Missing points evaluate to 0; the composition order does not matter.
    """
    out: Dict[MultiIndex, float] = dict(f)
    d = len(v)
    for r in range(d):
        for _ in range(v[r]):
            pts = set(out)
            pts.update(tuple(c + (1 if i == r else 0) for i, c in enumerate(w)) for w in out)
            nxt = {}
            for w in pts:
                shifted = tuple(c - (1 if i == r else 0) for i, c in enumerate(w))
                val = out.get(shifted, 0.0) - out.get(w, 0.0)
                if val != 0.0:
                    nxt[w] = val
            out = nxt
    return out


# ---------------------------------------------------------------------------
# identities


def difference_identity_tables(
    v: MultiIndex, params: MultinomialParams
) -> Dict[MultiIndex, Tuple[float, float]]:
    """Both sides of the difference identity on the whole |w| <= n+|v| grid.

    lhs: D^v pmf(., n) at w.  rhs: the degree-v Krawtchouk polynomial at
    trial count n+|v| times pmf(w, n+|v|) times v! n! / ((n+|v|)! p^v p0^|v|).
    """
    n = params.n
    table = {u: multinomial_pmf(u, params) for u in multi_indices_upto(params.d, n)}
    diff = finite_difference(v, table)
    scale = mi_factorial(v) * math.exp(math.lgamma(n + 1) - math.lgamma(n + order(v) + 1))
    for r in range(params.d):
        scale /= params.p[r] ** v[r]
    scale /= params.p0 ** order(v)
    out = {}
    for w in multi_indices_upto(params.d, n + order(v)):
        rhs = (
            krawtchouk(v, w, n + order(v), params)
            * multinomial_pmf(w, params, n + order(v))
            * scale
        )
        out[w] = (diff.get(w, 0.0), rhs)
    return out


def difference_pmf_identity(
    v: MultiIndex, w: MultiIndex, params: MultinomialParams
) -> Tuple[float, float]:
    """(lhs, rhs) of the difference identity at a single grid point."""
    return difference_identity_tables(v, params)[w]


def krawtchouk_pair_sum(
    v: MultiIndex, vt: MultiIndex, params: MultinomialParams
) -> Tuple[float, float]:
    """(lhs, rhs) of the quadratic-form identity for equal-order v, vt.

    lhs: sum over w of pmf(w, n+|v|) Kr(v; w) Kr(vt; w).
    rhs: closed form over w <= min(v, vt), always positive.
    """
    if order(v) != order(vt):
        raise ValueError("the identity needs |v| = |vt|")
    n, d = params.n, params.d
    m = n + order(v)
    lhs = 0.0
    for w in multi_indices_upto(d, m):
        pw = multinomial_pmf(w, params, m)
        if pw == 0.0:
            continue
        lhs += pw * krawtchouk(v, w, m, params) * krawtchouk(vt, w, m, params)
    vmin = tuple(min(a, b) for a, b in zip(v, vt))
    rhs = 0.0
    for w in indices_below(vmin):
        term = math.exp(math.lgamma(m + 1) - math.lgamma(n + 1))
        term *= math.factorial(order(v) - order(w))
        for r in range(d):
            term *= params.p[r] ** (v[r] + vt[r] - w[r])
        term *= params.p0 ** (order(w) + order(v))
        term /= mi_factorial(w)
        term /= mi_factorial(tuple(a - b for a, b in zip(v, w)))
        term /= mi_factorial(tuple(a - b for a, b in zip(vt, w)))
        rhs += term
    return lhs, rhs


def difference_expansion_gap(
    v: MultiIndex, atoms: Sequence[SignedMeasure], params: MultinomialParams
) -> float:
    """Max atom gap between the D^v pmf expansion and G^n prod (H_r - H_0)^v_r.

    atoms = (H_0, ..., H_d); G = p0 H_0 + sum p_r H_r.
    """
    n, d = params.n, params.d
    if len(atoms) != d + 1:
        raise ValueError("need d+1 atom measures")
    h0, hs = atoms[0], atoms[1:]
    table = {u: multinomial_pmf(u, params) for u in multi_indices_upto(d, n)}
    diff_table = finite_difference(v, table)
    m = n + order(v)
    terms = []
    for w, coef in diff_table.items():
        if order(w) > m or any(c < 0 for c in w):
            continue
        factors = [power(hs[r], w[r]) for r in range(d) if w[r]]
        factors.append(power(h0, m - order(w)))
        terms.append((coef, fold_convolve(factors)))
    lhs = linear_combine(terms) if terms else SignedMeasure.zero(h0.dim)
    g = linear_combine([(params.p0, h0)] + [(params.p[r], hs[r]) for r in range(d)])
    rhs = power(g, n)
    for r in range(d):
        if v[r]:
            rhs = convolve(rhs, power(hs[r] - h0, v[r]))
    from .measure import max_atom_diff

    return max_atom_diff(lhs, rhs)


# ---------------------------------------------------------------------------
# smoothing-inequality verifiers


@dataclass(frozen=True)
class VerifyRecord:
    """Outcome of one numerical inequality check."""

    name: str
    lhs: float
    rhs: float
    tol: float = 1e-10
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + self.tol


@dataclass(frozen=True)
class FiniteRandomVector:
    """A finitely supported random vector in R^d: (point, probability) pairs."""

    support: Tuple[Tuple[Tuple[float, ...], float], ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("support must be nonempty")
        d = len(self.support[0][0])
        if any(len(x) != d for x, _ in self.support):
            raise ValueError("support points must share a dimension")
        if any(pr < 0.0 for _, pr in self.support):
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(pr for _, pr in self.support) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @property
    def d(self) -> int:
        return len(self.support[0][0])


def _mixture(atoms: Sequence[SignedMeasure], params: MultinomialParams) -> SignedMeasure:
    h0, hs = atoms[0], atoms[1:]
    return linear_combine([(params.p0, h0)] + [(params.p[r], hs[r]) for r in range(params.d)])


def verify_coeff_smoothing(
    a: Mapping[MultiIndex, float],
    atoms: Sequence[SignedMeasure],
    params: MultinomialParams,
    n: int,
) -> VerifyRecord:
    """Smoothing bound for U1 = sum_{|v|=k} (a_v/v!) prod (H_r - H_0)^v_r.

    lhs = ||U1 G^n||; rhs is the weighted square sum over |w| <= k of the
    binomial-compressed coefficients.
    """
    if not a:
        return VerifyRecord("coeff_smoothing", 0.0, 0.0)
    ks = {order(v) for v in a}
    if len(ks) != 1:
        raise ValueError("all coefficient indices must share one order")
    k = ks.pop()
    d = params.d
    if len(atoms) != d + 1:
        raise ValueError("need d+1 atom measures")
    for hm in atoms:
        if not is_probability(hm):
            raise ValueError("atoms must be probability measures")
    h0, hs = atoms[0], atoms[1:]
    terms = []
    for v, av in a.items():
        if av == 0.0:
            continue
        factors = [power(hs[r] - h0, v[r]) for r in range(d) if v[r]]
        prod = fold_convolve(factors) if factors else delta0(h0.dim)
        terms.append((av / mi_factorial(v), prod))
    u1 = linear_combine(terms) if terms else SignedMeasure.zero(h0.dim)
    g = _mixture(atoms, params)
    lhs = tv_norm(convolve(u1, power(g, n)))

    ssum = 0.0
    for w in multi_indices_upto(d, k):
        inner = 0.0
        for v, av in a.items():
            prodb = 1.0
            for r in range(d):
                prodb *= gen_binomial(v[r], w[r])
            inner += av / mi_factorial(v) * prodb
        weight = mi_factorial(w) * math.factorial(k - order(w))
        for r in range(d):
            weight /= params.p[r] ** w[r]
        weight /= params.p0 ** (k - order(w))
        ssum += weight * inner * inner
    rhs = math.exp(0.5 * (math.lgamma(n + 1) - math.lgamma(n + k + 1))) * math.sqrt(ssum)
    return VerifyRecord("coeff_smoothing", lhs, rhs, extras={"k": k, "n": n})


def verify_moment_smoothing(
    x: FiniteRandomVector,
    atoms: Sequence[SignedMeasure],
    params: MultinomialParams,
    n: int,
    k: int,
) -> VerifyRecord:
    """Smoothing bound for U2 = E (sum_r X_r (H_r - H_0))^k.

    rhs pairs X with an independent copy: the k-th moment of
    sum_{r=0}^d X_r Y_r / p_r, where X_0 = sum of the coordinates.
    """
    d = params.d
    if x.d != d:
        raise ValueError("random vector dimension must match the parameters")
    h0, hs = atoms[0], atoms[1:]
    terms = []
    for pt, pr in x.support:
        if pr == 0.0:
            continue
        lin = linear_combine(
            [(pt[r], hs[r]) for r in range(d)] + [(-math.fsum(pt), h0)]
        ) if any(pt) else SignedMeasure.zero(h0.dim)
        terms.append((pr, power(lin, k)))
    u2 = linear_combine(terms) if terms else SignedMeasure.zero(h0.dim)
    g = _mixture(atoms, params)
    lhs = tv_norm(convolve(u2, power(g, n)))

    moment = 0.0
    for ptx, prx in x.support:
        x0 = math.fsum(ptx)
        for pty, pry in x.support:
            y0 = math.fsum(pty)
            s = x0 * y0 / params.p0
            for r in range(d):
                s += ptx[r] * pty[r] / params.p[r]
            moment += prx * pry * s**k
    rhs = math.sqrt(max(moment, 0.0)) / math.sqrt(math.comb(n + k, k))
    return VerifyRecord("moment_smoothing", lhs, rhs, extras={"k": k, "n": n})


def _chi2_of(u: SignedMeasure, g: SignedMeasure) -> float:
    """Integral of (dU/dG)^2 against G; raises if U is not dominated by G."""
    for pt in u.support():
        if g.mass(pt) == 0.0:
            raise AbsoluteContinuityViolation(pt)
    return math.fsum(mu * mu / g.mass(pt) for pt, mu in u.items())


def verify_chi2_smoothing(
    u: SignedMeasure, g: SignedMeasure, n: int, k: int
) -> VerifyRecord:
    """||U^k G^n|| <= binom(n+k, k)^(-1/2) (int (dU/dG)^2 dG)^(k/2).

    Needs |U| dominated by G and U of total mass zero.
    """
    if abs(total_mass(u)) > 1e-12:
        raise ValueError("U must have total mass 0")
    chi = _chi2_of(u, g)
    lhs = tv_norm(convolve(power(u, k), power(g, n)))
    rhs = chi ** (k / 2.0) / math.sqrt(math.comb(n + k, k))
    return VerifyRecord("chi2_smoothing", lhs, rhs, extras={"k": k, "n": n, "chi2": chi})


def verify_shifted_smoothing(
    u1: SignedMeasure, u2: SignedMeasure, g: SignedMeasure, n: int
) -> VerifyRecord:
    """||(U1+U2) G^n|| <= ||U1|| + |U2(X)| + (||U2+|| ^ ||U2-||) (n+1)^(-1/2) sqrt(int f^2 dG).

    f is built from the normalized parts of U2.  The extras carry both
    sides of the simplification (min norm)^2 int f^2 dG <= int h^2 dG.
    """
    up, un = positive_part(u2), negative_part(u2)
    if not up or not un:
        raise ValueError("U2 must have nonzero positive and negative parts")
    norm_p, norm_n = tv_norm(up), tv_norm(un)
    for pt in u2.support():
        if g.mass(pt) == 0.0:
            raise AbsoluteContinuityViolation(pt)
    f = {
        pt: up.mass(pt) / norm_p / g.mass(pt) - un.mass(pt) / norm_n / g.mass(pt)
        for pt in g.support()
    }
    int_f2 = math.fsum(val * val * g.mass(pt) for pt, val in f.items())
    lhs = tv_norm(convolve(u1 + u2, power(g, n)))
    mn = min(norm_p, norm_n)
    rhs = tv_norm(u1) + abs(total_mass(u2)) + mn / math.sqrt(n + 1.0) * math.sqrt(int_f2)
    int_h2 = _chi2_of(u2, g)
    return VerifyRecord(
        "shifted_smoothing",
        lhs,
        rhs,
        extras={"simplified_lhs": mn * mn * int_f2, "simplified_rhs": int_h2},
    )


def poisson_weights(t: float, tail: float = 1e-12, cap: int = 10000) -> List[float]:
    """P(N=m) for m = 0..m_max with Poisson tail mass below `tail`."""
    weights = []
    w = math.exp(-t)
    cum = 0.0
    m = 0
    while cum < 1.0 - tail and m <= cap:
        weights.append(w)
        cum += w
        m += 1
        w *= t / m
    return weights


def verify_compound_smoothing(
    u: SignedMeasure,
    g: SignedMeasure,
    t: float,
    k: int,
    m_max: Optional[int] = None,
) -> VerifyRecord:
    """Poisson-compound smoothing: ||U^k E[G^N]|| for N Poisson(t).

    lhs uses the truncated compound (the truncation deficit enters the
    tolerance as ||U||^k * deficit); rhs = t^(-k/2) sqrt(k! P(N>=k))
    (int f^2 dG)^(k/2).
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if abs(total_mass(u)) > 1e-12:
        raise ValueError("U must have total mass 0")
    chi = _chi2_of(u, g)
    weights = poisson_weights(t)
    if m_max is not None:
        weights = weights[: m_max + 1]
    comp = compound(weights, g)
    lhs = tv_norm(convolve(power(u, k), comp.measure))
    p_tail = 1.0 - math.fsum(weights[: min(k, len(weights))])
    rhs = math.sqrt(math.factorial(k) * p_tail) / t ** (k / 2.0) * chi ** (k / 2.0)
    slack = tv_norm(u) ** k * comp.deficit
    return VerifyRecord(
        "compound_smoothing",
        lhs,
        rhs,
        tol=1e-10 + slack,
        extras={"deficit": comp.deficit, "k": k, "t": t},
    )


def compound_inverse_moment_identity(t: float, k: int) -> Tuple[float, float]:
    """(series, quadrature) for E binom(N+k, k)^(-1) with N Poisson(t).

    Series side sums the truncated Poisson weights; integral side is
    k int_0^1 x^(k-1) e^(-t x) dx by adaptive quadrature.
    """
    weights = poisson_weights(t, tail=1e-15)
    series = math.fsum(w / math.comb(m + k, k) for m, w in enumerate(weights))
    integral, _ = quad(lambda x: k * x ** (k - 1) * math.exp(-t * x), 0.0, 1.0, epsabs=1e-12)
    return series, integral
