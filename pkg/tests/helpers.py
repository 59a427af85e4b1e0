"""Shared generators for the test suite (all seeded, no global state)."""

from __future__ import annotations

import math
import random

from convclose.measure import SignedMeasure


def rand_prob(rng: random.Random, dim: int = 1, span: int = 4, lo: int = 0) -> SignedMeasure:
    """Random probability measure with `span` atoms near the origin."""
    pts = set()
    while len(pts) < span:
        pts.add(tuple(rng.randint(lo, lo + span) for _ in range(dim)))
    raw = {p: rng.uniform(0.05, 1.0) for p in pts}
    total = math.fsum(raw.values())
    return SignedMeasure(dim, {p: w / total for p, w in raw.items()})


def rand_prob_full(rng: random.Random, span: int = 4, lo: int = 0) -> SignedMeasure:
    """Random probability measure with full support on lo..lo+span-1."""
    raw = [rng.uniform(0.05, 1.0) for _ in range(span)]
    total = math.fsum(raw)
    return SignedMeasure(1, {(lo + i,): w / total for i, w in enumerate(raw)})


def rand_prob_on(rng: random.Random, points) -> SignedMeasure:
    """Random probability measure supported on a subset of the given points."""
    pts = sorted(points)
    take = rng.sample(pts, rng.randint(1, len(pts)))
    raw = {p: rng.uniform(0.05, 1.0) for p in take}
    total = math.fsum(raw.values())
    return SignedMeasure(1, {p: w / total for p, w in raw.items()})


def rand_signed(rng: random.Random, dim: int = 1, span: int = 4, scale: float = 1.0) -> SignedMeasure:
    """Random signed measure with atoms in a small box."""
    atoms = {}
    for _ in range(span):
        p = tuple(rng.randint(-span, span) for _ in range(dim))
        atoms[p] = atoms.get(p, 0.0) + rng.uniform(-scale, scale)
    return SignedMeasure(dim, atoms)


def rand_prob_rational(rng: random.Random, span: int = 4, denom: int = 64) -> SignedMeasure:
    """Probability measure with masses on a rational grid (exact sums)."""
    raw = [rng.randint(1, denom) for _ in range(span)]
    total = sum(raw)
    return SignedMeasure(1, {(i,): r / total for i, r in enumerate(raw)})
