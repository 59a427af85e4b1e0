"""Explicit constants behind the error bounds.

Everything here is derived from the scalar function
h(x) = ln(2 - (1-x) e^x) / x^2 and a handful of one-dimensional root
findings:

* c1 = sup h = 0.694025... attained at x0 = 0.936219...
* x_l solves x^(l+1) + x/2 = 1; the plain smoothing constants are
  u_l = (2 e c1)^((l+1)/2) / (1 - x_l).
* xt_l solves x^(l+1) - x^2/2 + x = 1; for l >= 4 the mean-centered
  constants are ut_l = (2 e c1)^((l+1)/2) / (1 - xt_l).
* For l in {1,2,3}, ut_l comes instead from the sharper majorant
  zeta_l: ut_l = zeta_l(s_l) / s_l^((l+1)/2), where s_l is the unique
  crossing of zeta_l(s) with (2 - 2t + t^2 - t^(l+1))/(1 - t),
  t = sqrt(2 e c1 s).

The published one-decimal / two-decimal values (5.9, 17.3, ..., 10.94,
31.5, 82.2) are kept alongside the full-precision evaluations: the
chained bounds of the source tables were computed with the published
numbers, so both are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict

ROOT_TOL = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

U_PUBLISHED: Dict[int, float] = {0: 5.9, 1: 17.3, 2: 44.5, 3: 107.5}
UTILDE_PUBLISHED: Dict[int, float] = {1: 10.94, 2: 31.5, 3: 82.2}


def h(x: float) -> float:
    """ln(2 - (1-x)e^x) / x^2, the function whose supremum is c1."""
    return math.log(2.0 - (1.0 - x) * math.exp(x)) / (x * x)


def h_derivative_sign(x: float) -> float:
    """Sign of h'(x) via the integral form x^-3 * int_0^x t^2(2e^-t - 1)/(2e^-t - 1 + t)^2 dt.

    Only the integral's sign matters, so a plain composite Simpson rule
    on a fixed grid is enough.
    """
    n = 400
    hstep = x / n
    ts = [i * hstep for i in range(n + 1)]

    def integrand(t: float) -> float:
        if t == 0.0:
            return 0.0
        den = 2.0 * math.exp(-t) - 1.0 + t
        return t * t * (2.0 * math.exp(-t) - 1.0) / (den * den)

    vals = [integrand(t) for t in ts]
    simpson = vals[0] + vals[-1] + 4.0 * sum(vals[1:-1:2]) + 2.0 * sum(vals[2:-1:2])
    return math.copysign(1.0, simpson) if simpson != 0.0 else 0.0


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=1)
def compute_c1() -> tuple:
    """(c1, x0): maximum of h over (0, inf) and its argmax."""
    x0 = _golden_max(h, 0.5, 1.5, 1e-12)
    return h(x0), x0


def c1() -> float:
    return compute_c1()[0]


def two_e_c1() -> float:
    return 2.0 * math.e * c1()


@lru_cache(maxsize=None)
def x_ell(ell: int) -> float:
    """Unique root in (0,1) of x^(l+1) + x/2 = 1."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return bisect(lambda x: x ** (ell + 1) + 0.5 * x - 1.0, 1e-9, 1.0 - 1e-9)


@lru_cache(maxsize=None)
def xtilde_ell(ell: int) -> float:
    """Unique root in (0,1) of x^(l+1) - x^2/2 + x = 1."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return bisect(lambda x: x ** (ell + 1) - 0.5 * x * x + x - 1.0, 1e-9, 1.0 - 1e-9)


def u_ell(ell: int) -> float:
    """Smoothing constant for the unrestricted bound: (2ec1)^((l+1)/2)/(1-x_l)."""
    return two_e_c1() ** ((ell + 1) / 2.0) / (1.0 - x_ell(ell))


def zeta_ell(ell: int, x: float) -> float:
    """The order-l majorant from the mean-centered analysis (l in {1,2,3}).

    Sum of the per-order terms x, sqrt(3) x^{3/2}, 2 x^2, 5^{5/2}/6 x^{5/2},
    15/2 x^3, 7^{7/2}/24 x^{7/2} (leading terms dropped as l grows) plus the
    geometric tail (2ec1 x)^4 / (1 - sqrt(2ec1 x)).
    """
    if ell not in (1, 2, 3):
        raise ValueError("zeta_ell is defined for ell in {1, 2, 3}")
    t = math.sqrt(two_e_c1() * x)
    if t >= 1.0:
        return math.inf
    terms = [
        x,
        math.sqrt(3.0) * x ** 1.5,
        2.0 * x ** 2,
        5.0 ** 2.5 / 6.0 * x ** 2.5,
        7.5 * x ** 3,
        7.0 ** 3.5 / 24.0 * x ** 3.5,
    ]
    return math.fsum(terms[ell - 1:]) + (two_e_c1() * x) ** 4 / (1.0 - t)


def _capped_tail(ell: int, x: float) -> float:
    # (2 - 2t + t^2 - t^(l+1)) / (1 - t) with t = sqrt(2ec1 x)
    t = math.sqrt(two_e_c1() * x)
    return (2.0 - 2.0 * t + t * t - t ** (ell + 1)) / (1.0 - t)


@lru_cache(maxsize=None)
def s_ell(ell: int) -> float:
    """Crossing of zeta_l(s) with the capped tail bound, in [0.01, 0.5].

    A 1e-3 grid scan asserts a single sign change before bisecting.
    """
    if ell not in (1, 2, 3):
        raise ValueError("s_ell is defined for ell in {1, 2, 3}")

    def gap(s: float) -> float:
        return zeta_ell(ell, s) - _capped_tail(ell, s)

    lo, hi = 0.01, 0.5
    changes = 0
    prev = gap(lo)
    grid = lo
    while grid < hi - 1e-12:
        grid = min(grid + 1e-3, hi)
        cur = gap(grid)
        if (prev < 0.0) != (cur < 0.0):
            changes += 1
        prev = cur
    if changes != 1:
        raise RuntimeError(f"expected one crossing for ell={ell}, saw {changes}")
    return bisect(gap, lo, hi)


def utilde_ell(ell: int) -> float:
    """Smoothing constant for the mean-centered bound.

    l in {1,2,3} uses the sharp zeta construction; l >= 4 uses
    (2ec1)^((l+1)/2)/(1-xt_l).  l = 0 is rejected: the mean-centered
    bound needs l >= 1.
    """
    if ell < 1:
        raise ValueError("mean-centered constants need ell >= 1")
    if ell <= 3:
        s = s_ell(ell)
        return zeta_ell(ell, s) / s ** ((ell + 1) / 2.0)
    return two_e_c1() ** ((ell + 1) / 2.0) / (1.0 - xtilde_ell(ell))


@dataclass(frozen=True)
class ConstantsTable:
    """All the explicit constants, evaluated once."""

    c1: float
    x0: float
    x_ell: Dict[int, float]
    xtilde_ell: Dict[int, float]
    u_ell: Dict[int, float]
    utilde_ell: Dict[int, float]
    s_ell: Dict[int, float]


@lru_cache(maxsize=None)
def constants_table(ell_max: int = 8) -> ConstantsTable:
    c, x0 = compute_c1()
    return ConstantsTable(
        c1=c,
        x0=x0,
        x_ell={l: x_ell(l) for l in range(ell_max + 1)},
        xtilde_ell={l: xtilde_ell(l) for l in range(1, ell_max + 1)},
        u_ell={l: u_ell(l) for l in range(ell_max + 1)},
        utilde_ell={l: utilde_ell(l) for l in range(1, ell_max + 1)},
        s_ell={l: s_ell(l) for l in (1, 2, 3)},
    )
