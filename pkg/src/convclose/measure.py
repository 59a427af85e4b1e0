"""Finitely supported signed measures on integer lattices.

The measure algebra everything else is built on: sparse signed measures
on Z^d with convolution as the product, total variation norm, restriction,
densities and compound mixtures.  Measures are immutable after
construction and every operation returns a fresh instance, so instances
can be shared freely.

Numerical policy: atoms with an exact 0.0 mass are removed after every
operation, nothing else is pruned (an explicit prune() exists but is not
used by the table-reproduction paths), and every bucket/norm accumulation
is compensated (see convclose.kernels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from . import kernels

Point = Tuple[int, ...]

# A 1-D convolution runs on the dense kernel only while the output span
# stays comparable to the naive sparse work; beyond that the dict path wins.
_LINE_SPAN_CAP = 1 << 24

PROB_TOL = 1e-12


class DimensionMismatch(ValueError):
    """Raised when measures of different lattice dimensions are combined."""


class AbsoluteContinuityViolation(ValueError):
    """Raised when a density is requested for F not dominated by G."""

    def __init__(self, point: Point):
        self.point = point
        super().__init__(f"atom at {point} lies outside the support of the base measure")


def as_point(x, dim: int | None = None) -> Point:
    """Normalize an atom location to a tuple of ints."""
    if isinstance(x, int):
        pt: Point = (x,)
    else:
        pt = tuple(int(c) for c in x)
    if dim is not None and len(pt) != dim:
        raise DimensionMismatch(f"point {pt} has dimension {len(pt)}, expected {dim}")
    return pt


class SignedMeasure:
    """A finitely supported signed measure on Z^dim.

    Atoms are held in a dict keyed by integer coordinate tuples; stored
    masses are never exactly 0.0.
    """

    __slots__ = ("dim", "_atoms")

    def __init__(self, dim: int, atoms: Mapping[Point, float] | Iterable[tuple] = ()):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)
        clean: Dict[Point, float] = {}
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for loc, mass in items:
            pt = as_point(loc, self.dim)
            m = float(mass)
            if m != 0.0:
                m = clean.get(pt, 0.0) + m
                if m != 0.0:
                    clean[pt] = m
                elif pt in clean:
                    del clean[pt]
        self._atoms = clean

    # internal fast constructor: caller guarantees clean atoms
    @classmethod
    def _wrap(cls, dim: int, atoms: Dict[Point, float]) -> "SignedMeasure":
        m = object.__new__(cls)
        m.dim = dim
        m._atoms = atoms
        return m

    @classmethod
    def zero(cls, dim: int = 1) -> "SignedMeasure":
        return cls._wrap(dim, {})

    # -- inspection ---------------------------------------------------------
    def mass(self, x) -> float:
        return self._atoms.get(as_point(x, self.dim), 0.0)

    def items(self):
        return self._atoms.items()

    def support(self) -> frozenset:
        return frozenset(self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def __bool__(self) -> bool:
        return bool(self._atoms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SignedMeasure)
            and self.dim == other.dim
            and self._atoms == other._atoms
        )

    def __repr__(self) -> str:
        k = len(self._atoms)
        return f"SignedMeasure(dim={self.dim}, atoms={k}, tv={tv_norm(self):.6g})"

    # -- algebra ------------------------------------------------------------
    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        return linear_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return linear_combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "SignedMeasure":
        return SignedMeasure._wrap(self.dim, {p: -m for p, m in self._atoms.items()})

    def __mul__(self, c) -> "SignedMeasure":
        return scale(float(c), self)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "SignedMeasure":
        return power(self, m)

    def convolve(self, other: "SignedMeasure") -> "SignedMeasure":
        return convolve(self, other)


def delta(x) -> SignedMeasure:
    """Dirac measure at x (an int for d=1, else a coordinate tuple)."""
    pt = as_point(x)
    return SignedMeasure._wrap(len(pt), {pt: 1.0})


def delta0(dim: int) -> SignedMeasure:
    """The convolution identity on Z^dim."""
    return SignedMeasure._wrap(dim, {(0,) * dim: 1.0})


def scale(c: float, a: SignedMeasure) -> SignedMeasure:
    if c == 0.0:
        return SignedMeasure.zero(a.dim)
    return SignedMeasure._wrap(a.dim, {p: c * m for p, m in a._atoms.items()})


def _check_dims(measures: Sequence[SignedMeasure]) -> int:
    dim = measures[0].dim
    for m in measures[1:]:
        if m.dim != dim:
            raise DimensionMismatch(f"mixed dimensions {dim} and {m.dim}")
    return dim


def linear_combine(terms: Sequence[tuple]) -> SignedMeasure:
    """Atom-wise sum of coefficient * measure with compensated buckets.

    Resulting exact-0.0 atoms are removed; there is no epsilon pruning.
    """
    if not terms:
        raise ValueError("need at least one (coefficient, measure) term")
    dim = _check_dims([m for _, m in terms])
    acc: Dict[Point, float] = {}
    comp: Dict[Point, float] = {}
    for c, meas in terms:
        c = float(c)
        if c == 0.0:
            continue
        for p, m in meas._atoms.items():
            v = c * m - comp.get(p, 0.0)
            old = acc.get(p, 0.0)
            t = old + v
            comp[p] = (t - old) - v
            acc[p] = t
    return SignedMeasure._wrap(dim, {p: m for p, m in acc.items() if m != 0.0})


# -- 1-D dense fast path ----------------------------------------------------

def _line_of(a: SignedMeasure):
    """Dense (lo, coefficient array) view of a 1-D measure, or None."""
    if a.dim != 1 or not a._atoms:
        return None
    keys = [p[0] for p in a._atoms]
    lo, hi = min(keys), max(keys)
    span = hi - lo + 1
    if span > _LINE_SPAN_CAP:
        return None
    arr = np.zeros(span, dtype=np.float64)
    for p, m in a._atoms.items():
        arr[p[0] - lo] = m
    return lo, arr


def _measure_of_line(lo: int, arr: np.ndarray) -> SignedMeasure:
    idx = np.nonzero(arr)[0]
    vals = arr[idx].tolist()
    atoms = {(int(lo + i),): v for i, v in zip(idx.tolist(), vals)}
    return SignedMeasure._wrap(1, atoms)


def _line_profitable(na: int, nb: int, span_out: int) -> bool:
    return span_out <= 4 * na * nb + 1024


def convolve(a: SignedMeasure, b: SignedMeasure) -> SignedMeasure:
    """Convolution (A*B)(z) = sum_{x+y=z} A(x)B(y)."""
    dim = _check_dims([a, b])
    if not a._atoms or not b._atoms:
        return SignedMeasure.zero(dim)
    if dim == 1:
        la, lb = _line_of(a), _line_of(b)
        if la is not None and lb is not None:
            span_out = len(la[1]) + len(lb[1]) - 1
            if _line_profitable(len(a), len(b), span_out):
                return _measure_of_line(la[0] + lb[0], kernels.line_conv(la[1], lb[1]))
    return _convolve_dict(a, b)


def _convolve_dict(a: SignedMeasure, b: SignedMeasure) -> SignedMeasure:
    acc: Dict[Point, float] = {}
    comp: Dict[Point, float] = {}
    for pa, ma in a._atoms.items():
        for pb, mb in b._atoms.items():
            z = tuple(x + y for x, y in zip(pa, pb))
            v = ma * mb - comp.get(z, 0.0)
            old = acc.get(z, 0.0)
            t = old + v
            comp[z] = (t - old) - v
            acc[z] = t
    return SignedMeasure._wrap(a.dim, {p: m for p, m in acc.items() if m != 0.0})


def power(a: SignedMeasure, m: int) -> SignedMeasure:
    """m-fold convolution power; A**0 is the Dirac at the origin."""
    if m < 0:
        raise ValueError("negative convolution power")
    if m == 0:
        return delta0(a.dim)
    if m == 1:
        return SignedMeasure._wrap(a.dim, dict(a._atoms))
    line = _line_of(a) if a.dim == 1 else None
    if line is not None:
        lo, arr = line
        span_out = m * (len(arr) - 1) + 1
        if span_out <= _LINE_SPAN_CAP and _line_profitable(len(a), len(a), span_out):
            acc_lo, acc = 0, np.array([1.0])
            base_lo, base = lo, arr
            k = m
            while True:
                if k & 1:
                    acc_lo, acc = acc_lo + base_lo, kernels.line_conv(acc, base)
                k >>= 1
                if not k:
                    break
                base_lo, base = 2 * base_lo, kernels.line_conv(base, base)
            return _measure_of_line(acc_lo, acc)
    acc_m = delta0(a.dim)
    base_m = a
    k = m
    while True:
        if k & 1:
            acc_m = convolve(acc_m, base_m)
        k >>= 1
        if not k:
            break
        base_m = convolve(base_m, base_m)
    return acc_m


def fold_convolve(measures: Sequence[SignedMeasure]) -> SignedMeasure:
    """Left-fold convolution product of a sequence of measures."""
    if not measures:
        raise ValueError("empty product is ambiguous; pass [delta0(dim)]")
    dim = _check_dims(list(measures))
    if dim == 1:
        lines = [_line_of(m) for m in measures]
        if all(line is not None for line in lines):
            span_out = sum(len(line[1]) - 1 for line in lines) + 1
            if span_out <= _LINE_SPAN_CAP:
                lo = sum(line[0] for line in lines)
                acc = lines[0][1]
                for _, arr in lines[1:]:
                    acc = kernels.line_conv(acc, arr)
                return _measure_of_line(lo, acc)
    out = measures[0]
    for m in measures[1:]:
        out = convolve(out, m)
    return out


# -- norms, parts, restriction ----------------------------------------------

def tv_norm(a: SignedMeasure) -> float:
    """Total variation norm: sum of |mass| over atoms."""
    if not a._atoms:
        return 0.0
    return kernels.abs_sum(np.fromiter(a._atoms.values(), dtype=np.float64, count=len(a._atoms)))


def tv_distance(a: SignedMeasure, b: SignedMeasure) -> float:
    return tv_norm(a - b)


def total_mass(a: SignedMeasure) -> float:
    """Signed total mass A(Z^d)."""
    if not a._atoms:
        return 0.0
    return kernels.total(np.fromiter(a._atoms.values(), dtype=np.float64, count=len(a._atoms)))


def positive_part(a: SignedMeasure) -> SignedMeasure:
    return SignedMeasure._wrap(a.dim, {p: m for p, m in a._atoms.items() if m > 0.0})


def negative_part(a: SignedMeasure) -> SignedMeasure:
    return SignedMeasure._wrap(a.dim, {p: -m for p, m in a._atoms.items() if m < 0.0})


def restrict(a: SignedMeasure, points: Iterable) -> SignedMeasure:
    """Keep only atoms located in the given point set."""
    keep = {as_point(p, a.dim) for p in points}
    return SignedMeasure._wrap(a.dim, {p: m for p, m in a._atoms.items() if p in keep})


def prune(a: SignedMeasure, eps: float) -> SignedMeasure:
    """Drop atoms with |mass| <= eps.  Never used on exact-distance paths."""
    return SignedMeasure._wrap(a.dim, {p: m for p, m in a._atoms.items() if abs(m) > eps})


def is_probability(a: SignedMeasure, tol: float = PROB_TOL) -> bool:
    if any(m < 0.0 for m in a._atoms.values()):
        return False
    return abs(total_mass(a) - 1.0) <= tol


def max_atom_diff(a: SignedMeasure, b: SignedMeasure) -> float:
    """Largest |A({x}) - B({x})| over the union of supports."""
    _check_dims([a, b])
    worst = 0.0
    for p in a.support() | b.support():
        worst = max(worst, abs(a._atoms.get(p, 0.0) - b._atoms.get(p, 0.0)))
    return worst


# -- densities and compounds -------------------------------------------------

def density_wrt(f: SignedMeasure, g: SignedMeasure) -> Dict[Point, float]:
    """Pointwise density f(x) = F({x})/G({x}) on the support of G.

    G must be a probability measure and F must be absolutely continuous
    with respect to G (no atom outside supp G).
    """
    _check_dims([f, g])
    if not is_probability(g):
        raise ValueError("base measure must be a probability measure")
    for p in f._atoms:
        if p not in g._atoms:
            raise AbsoluteContinuityViolation(p)
    return {p: f._atoms.get(p, 0.0) / gm for p, gm in g._atoms.items()}


def chi2_integral(f: SignedMeasure, g: SignedMeasure) -> float:
    """The chi-square type integral of (dF/dG - 1)^2 against G."""
    dens = density_wrt(f, g)
    return math.fsum((dens[p] - 1.0) ** 2 * g._atoms[p] for p in g._atoms)


@dataclass(frozen=True)
class CompoundMeasure:
    """A truncated compound sum_m w_m G^m with its truncation deficit."""

    measure: SignedMeasure
    deficit: float


def compound(weights: Sequence[float], g: SignedMeasure) -> CompoundMeasure:
    """sum_m weights[m] * G^m for m = 0..len(weights)-1.

    The weights are P(N=m) of a counting variable truncated at m_max; the
    deficit 1 - sum(weights) is carried for error accounting.
    """
    ws = [float(w) for w in weights]
    if any(w < 0.0 for w in ws):
        raise ValueError("compound weights must be nonnegative")
    s = math.fsum(ws)
    if s > 1.0 + PROB_TOL:
        raise ValueError("compound weights must sum to at most 1")
    if not is_probability(g):
        raise ValueError("compound base must be a probability measure")
    terms = []
    g_pow = delta0(g.dim)
    for m, w in enumerate(ws):
        if m > 0:
            g_pow = convolve(g_pow, g)
        if w != 0.0:
            terms.append((w, g_pow))
    meas = linear_combine(terms) if terms else SignedMeasure.zero(g.dim)
    return CompoundMeasure(meas, 1.0 - s)


# -- text serialization -------------------------------------------------------

def to_text(a: SignedMeasure) -> str:
    """One atom per line: 'c1 c2 ... cd mass'."""
    lines = [f"# dim {a.dim}"]
    for p in sorted(a._atoms):
        coords = " ".join(str(c) for c in p)
        lines.append(f"{coords} {a._atoms[p]!r}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> SignedMeasure:
    """Parse the line format written by to_text.

    The '# dim d' header is optional; without it the dimension is taken
    from the first atom line.  Repeated locations accumulate.
    """
    dim = None
    atoms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "dim":
                dim = int(parts[1])
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"bad atom line: {raw!r}")
        coords = tuple(int(c) for c in parts[:-1])
        atoms.append((coords, float(parts[-1])))
    if dim is None:
        if not atoms:
            raise ValueError("empty measure text without a dim header")
        dim = len(atoms[0][0])
    return SignedMeasure(dim, atoms)
