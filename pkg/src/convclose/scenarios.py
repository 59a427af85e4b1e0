"""Scenario generators for the report tables.

Two categorical families with d+1 = 11 categories and a symmetric family,
plus the mappings that realize a category matrix as measures: abstract
atoms, unit vectors of Z^d, or the points 0..d of Z (the one-dimensional
mapping that makes exact distances computable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bounds import CategoricalFamily, SymmetricFamily
from .expansion import ExpansionInput, expansion_input
from .measure import SignedMeasure, linear_combine

KINDS = (
    "example1",
    "example2",
    "example3_binomial",
    "example3_linear",
    "symmetric",
    "custom",
)

ATOM_MODES = ("abstract-categorical", "unit-vectors", "integer-line")


@dataclass(frozen=True)
class ScenarioSpec:
    """One scenario row: family kind, size, shape parameter, order."""

    kind: str
    n: int
    a: Optional[float] = None
    b: Optional[float] = None
    d: int = 10
    ell: int = 1
    atom_mode: str = "abstract-categorical"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.atom_mode not in ATOM_MODES:
            raise ValueError(f"unknown atom mode {self.atom_mode!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind in ("example1", "example3_binomial") and (self.a is None or self.a < 1):
            raise ValueError("this family needs a shape parameter a >= 1")
        if self.kind in ("example2", "example3_linear") and (self.b is None or self.b < 1):
            raise ValueError("this family needs a shape parameter b >= 1")

    @property
    def label(self) -> str:
        bits = [f"n={self.n}"]
        if self.a is not None:
            bits.append(f"a={self.a:g}")
        if self.b is not None:
            bits.append(f"b={self.b:g}")
        return f"{self.kind}[{','.join(bits)}]"


def gen_example1(n: int, a: float, d: int = 10) -> CategoricalFamily:
    """Rows are binomial(d, q_j) counting densities, q_j = 0.4 + (j+9)^-a."""
    if n < 1 or a < 1:
        raise ValueError("need n >= 1 and a >= 1")
    p = np.empty((n, d + 1))
    for j in range(1, n + 1):
        q = 0.4 + (j + 9) ** (-a)
        for r in range(d + 1):
            p[j - 1, r] = math.comb(d, r) * q**r * (1.0 - q) ** (d - r)
    return CategoricalFamily(p)


def gen_example2(n: int, b: float, d: int = 10) -> CategoricalFamily:
    """Rows proportional to 1 + (j+r)/(b(n+d)), normalized per row."""
    if n < 1 or b < 1:
        raise ValueError("need n >= 1 and b >= 1")
    p = np.empty((n, d + 1))
    for j in range(1, n + 1):
        row = np.array([1.0 + (j + r) / (b * (n + d)) for r in range(d + 1)])
        p[j - 1] = row / row.sum()
    return CategoricalFamily(p)


def gen_symmetric(n: int, shape: float = 1.0, b: int = 3) -> SymmetricFamily:
    """A symmetric family on {-b..b} with example2-style row drift."""
    if n < 1 or shape < 1 or b < 1:
        raise ValueError("need n >= 1, shape >= 1 and b >= 1")
    p = np.empty((n, b + 1))
    for j in range(1, n + 1):
        w = np.array([1.0 + (j + r) / (shape * (n + b)) for r in range(b + 1)])
        total = w[0] + 2.0 * w[1:].sum()
        p[j - 1] = w / total
    return SymmetricFamily(p)


def to_integer_line(fam: CategoricalFamily) -> ExpansionInput:
    """Realize the family on Z with the atom for category r at the point r."""
    fs = [
        SignedMeasure(1, {(r,): fam.p[j, r] for r in range(fam.d + 1) if fam.p[j, r]})
        for j in range(fam.n)
    ]
    return expansion_input(fs)


def to_unit_vectors(fam: CategoricalFamily) -> ExpansionInput:
    """Realize the family on Z^d with atoms at the origin and unit vectors."""
    d = fam.d
    origin = (0,) * d
    units = [tuple(1 if i == r else 0 for i in range(d)) for r in range(d)]
    fs = []
    for j in range(fam.n):
        atoms = {origin: fam.p[j, 0]}
        for r in range(1, d + 1):
            if fam.p[j, r]:
                atoms[units[r - 1]] = fam.p[j, r]
        fs.append(SignedMeasure(d, atoms))
    return expansion_input(fs)


def with_atoms(fam: CategoricalFamily, atoms: Sequence[SignedMeasure]) -> ExpansionInput:
    """Realize the family with arbitrary probability atoms H_0..H_d."""
    if len(atoms) != fam.d + 1:
        raise ValueError("need d+1 atom measures")
    fs = [
        linear_combine([(fam.p[j, r], atoms[r]) for r in range(fam.d + 1)])
        for j in range(fam.n)
    ]
    return expansion_input(fs)


def symmetric_to_input(sym: SymmetricFamily) -> ExpansionInput:
    return expansion_input(sym.to_measures())


def family_for(spec: ScenarioSpec) -> CategoricalFamily:
    if spec.kind in ("example1", "example3_binomial"):
        return gen_example1(spec.n, spec.a, spec.d)
    if spec.kind in ("example2", "example3_linear"):
        return gen_example2(spec.n, spec.b, spec.d)
    raise ValueError(f"{spec.kind} has no categorical family")
