"""Shared deterministic generators for the test corpus."""

from __future__ import annotations

import random
from fractions import Fraction

from fbasis import (
    CoFinite,
    Complement,
    Constant,
    ExplicitPrefix,
    Finite,
    GeometricIndex,
    Intersection,
    PowerLog,
    Range,
    Residue,
    Union,
)


def random_set_expr(rng: random.Random, depth: int = 2):
    """A random sampled-free set expression."""
    if depth == 0:
        kind = rng.randrange(5)
        if kind == 0:
            vals = sorted(rng.sample(range(1, 40), rng.randrange(0, 4)))
            return Finite(tuple(vals))
        if kind == 1:
            vals = sorted(rng.sample(range(1, 40), rng.randrange(0, 4)))
            return CoFinite(tuple(vals))
        if kind == 2:
            q = rng.randrange(1, 7)
            return Residue(q, rng.randrange(q))
        if kind == 3:
            lo = rng.randrange(1, 30)
            if rng.random() < 0.5:
                return Range(lo, None)
            return Range(lo, lo + rng.randrange(0, 50))
        return GeometricIndex(Fraction(rng.randrange(2, 5)))
    kind = rng.randrange(3)
    if kind == 0:
        return Union(tuple(random_set_expr(rng, depth - 1) for _ in range(2)))
    if kind == 1:
        return Intersection(tuple(random_set_expr(rng, depth - 1) for _ in range(2)))
    return Complement(random_set_expr(rng, depth - 1))


def random_power_seq(rng: random.Random, beta_range=(-2, 2), allow_log=True):
    c = Fraction(rng.randrange(1, 9), rng.randrange(1, 5))
    beta = Fraction(rng.randrange(beta_range[0] * 4, beta_range[1] * 4 + 1), 4)
    gamma = Fraction(0)
    if allow_log and rng.random() < 0.3:
        gamma = Fraction(rng.choice([-2, -1, 1, 2]), 2)
    if beta == 0 and gamma == 0 and rng.random() < 0.5:
        return Constant(c)
    return PowerLog(c, beta, gamma)


def random_target_seq(rng: random.Random):
    """A target sequence with all values above 1."""
    kind = rng.randrange(3)
    if kind == 0:
        return Constant(Fraction(rng.randrange(2, 9), rng.choice([1, 2])) + 1)
    if kind == 1:
        beta = Fraction(rng.randrange(1, 5), 4)
        head = tuple(Fraction(rng.randrange(2, 6)) for _ in range(rng.randrange(0, 3)))
        tail = PowerLog(2, beta)
        return ExplicitPrefix(head, tail) if head else tail
    return PowerLog(Fraction(rng.randrange(2, 5)), Fraction(rng.randrange(0, 3), 4))
