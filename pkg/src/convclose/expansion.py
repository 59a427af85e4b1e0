"""Signed-measure expansion of a convolution product around G^n.

For probability measures F_1..F_n and a reference G, the elementary
symmetric measures

    V_k = sum over k-subsets J of the product of (F_j - G), j in J

telescope the product: prod F_j = sum_k V_k G^(n-k).  The order-l
approximant W_l keeps the first l+1 terms.  V_k is evaluated through the
Newton-identity recursion over the power sums Gamma_k = sum_j (G - F_j)^k,
with the direct subset enumeration kept as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .measure import (
    PROB_TOL,
    SignedMeasure,
    _check_dims,
    convolve,
    delta0,
    fold_convolve,
    is_probability,
    linear_combine,
    power,
    scale,
    tv_norm,
)

BRUTEFORCE_N_CAP = 20
RECURSION_K_CAP = 16


def mean_measure(fs: Sequence[SignedMeasure]) -> SignedMeasure:
    """Arithmetic mean (1/n) sum F_j."""
    n = len(fs)
    return linear_combine([(1.0 / n, f) for f in fs])


@dataclass(frozen=True)
class ExpansionInput:
    """The factors F_1..F_n and the reference probability measure G."""

    fs: Tuple[SignedMeasure, ...]
    g: SignedMeasure

    def __post_init__(self):
        if not self.fs:
            raise ValueError("need n >= 1 factors")
        _check_dims(list(self.fs) + [self.g])
        for j, f in enumerate(self.fs):
            if not is_probability(f, PROB_TOL):
                raise ValueError(f"factor {j + 1} is not a probability measure")
        if not is_probability(self.g, PROB_TOL):
            raise ValueError("reference G is not a probability measure")

    @property
    def n(self) -> int:
        return len(self.fs)

    @property
    def dim(self) -> int:
        return self.g.dim


def expansion_input(fs: Sequence[SignedMeasure], g: Optional[SignedMeasure] = None) -> ExpansionInput:
    """Build an ExpansionInput; G defaults to the mean of the factors."""
    fs = tuple(fs)
    if g is None:
        g = mean_measure(fs)
    return ExpansionInput(fs, g)


def gamma_k(inp: ExpansionInput, k: int) -> SignedMeasure:
    """Power-sum measure sum_j (G - F_j)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = [(1.0, power(inp.g - f, k)) for f in inp.fs]
    return linear_combine(terms)


def v_k_recursive(inp: ExpansionInput, k_max: Optional[int] = None) -> List[SignedMeasure]:
    """V_0..V_k_max via V_k = -(1/k) sum_{j<k} V_j Gamma_{k-j}."""
    if k_max is None:
        k_max = min(inp.n, RECURSION_K_CAP)
    if not 0 <= k_max <= inp.n:
        raise ValueError(f"k_max must lie in [0, n={inp.n}]")
    vs = [delta0(inp.dim)]
    if k_max == 0:
        return vs
    gammas = [gamma_k(inp, k) for k in range(1, k_max + 1)]
    for k in range(1, k_max + 1):
        acc = linear_combine(
            [(1.0, convolve(vs[j], gammas[k - j - 1])) for j in range(k)]
        )
        vs.append(scale(-1.0 / k, acc))
    return vs


def v_k_bruteforce(inp: ExpansionInput, k: int) -> SignedMeasure:
    """Direct sum over all C(n,k) subsets; oracle for the recursion."""
    n = inp.n
    if n > BRUTEFORCE_N_CAP:
        raise ValueError(f"brute force guarded at n <= {BRUTEFORCE_N_CAP}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, n={n}]")
    if k == 0:
        return delta0(inp.dim)
    diffs = [f - inp.g for f in inp.fs]
    terms = []
    for subset in combinations(range(n), k):
        prod = diffs[subset[0]]
        for j in subset[1:]:
            prod = convolve(prod, diffs[j])
        terms.append((1.0, prod))
    return linear_combine(terms)


def w_ell(inp: ExpansionInput, ell: int) -> SignedMeasure:
    """Order-l approximant W_l = sum_{k<=l} V_k G^(n-k)."""
    n = inp.n
    if not 0 <= ell <= n:
        raise ValueError(f"ell must lie in [0, n={n}]")
    vs = v_k_recursive(inp, ell)
    g_pow = power(inp.g, n - ell)
    terms = []
    for k in range(ell, -1, -1):
        terms.append((1.0, convolve(vs[k], g_pow)))
        if k > 0:
            g_pow = convolve(g_pow, inp.g)
    return linear_combine(terms)


def exact_product(fs: Sequence[SignedMeasure]) -> SignedMeasure:
    """Convolution product of the factors, left fold."""
    return fold_convolve(list(fs))


def exact_distance(inp: ExpansionInput, ell: int) -> float:
    """Total variation norm of (prod F_j - W_l), evaluated exactly."""
    return tv_norm(exact_product(inp.fs) - w_ell(inp, ell))


# Closed forms of V_2..V_8 in terms of the power sums, valid when G is the
# mean of the factors (V_1 = 0).  Each entry maps a Gamma-exponent tuple
# (e_2, e_3, ...) meaning Gamma_2^e2 * Gamma_3^e3 * ... to its coefficient.
_CLOSED_FORMS = {
    1: {},
    2: {(1,): -0.5},
    3: {(0, 1): -1.0 / 3.0},
    4: {(2,): 1.0 / 8.0, (0, 0, 1): -0.25},
    5: {(1, 1): 1.0 / 6.0, (0, 0, 0, 1): -0.2},
    6: {
        (3,): -1.0 / 48.0,
        (1, 0, 1): 1.0 / 8.0,
        (0, 2): 1.0 / 18.0,
        (0, 0, 0, 0, 1): -1.0 / 6.0,
    },
    7: {
        (2, 1): -1.0 / 24.0,
        (1, 0, 0, 1): 1.0 / 10.0,
        (0, 1, 1): 1.0 / 12.0,
        (0, 0, 0, 0, 0, 1): -1.0 / 7.0,
    },
    8: {
        (4,): 1.0 / 384.0,
        (2, 0, 1): -1.0 / 32.0,
        (1, 2): -1.0 / 36.0,
        (1, 0, 0, 0, 1): 1.0 / 12.0,
        (0, 1, 0, 1): 1.0 / 15.0,
        (0, 0, 2): 1.0 / 32.0,
        (0, 0, 0, 0, 0, 0, 1): -1.0 / 8.0,
    },
}


def v_k_closed_form(inp: ExpansionInput, k: int) -> SignedMeasure:
    """V_k from its closed form in the power sums (k <= 8, G = mean)."""
    if k not in _CLOSED_FORMS:
        raise ValueError("closed forms implemented for 1 <= k <= 8")
    form = _CLOSED_FORMS[k]
    if not form:
        return SignedMeasure.zero(inp.dim)
    max_m = max(len(exps) + 1 for exps in form)
    gammas = {m: gamma_k(inp, m) for m in range(2, max_m + 1)}
    terms = []
    for exps, coef in form.items():
        prod = delta0(inp.dim)
        for i, e in enumerate(exps):
            if e:
                prod = convolve(prod, power(gammas[i + 2], e))
        terms.append((coef, prod))
    return linear_combine(terms)
