"""Seeded random elements: c + t^r * (small random polynomial in t, e1..em)."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .core_arith import MPoly, RatFunc, T_VAR
from .field import FieldElem, t_power


def random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        if num:
            return Fraction(num, rng.randint(1, bound))


def random_poly(
    rng: random.Random,
    gens: Sequence[int],
    degree: int = 2,
    terms: int = 3,
    bound: int = 3,
) -> FieldElem:
    """A nonzero polynomial in t and the given generators with small coefficients."""
    variables = [T_VAR, *gens]
    while True:
        items = []
        for _ in range(terms):
            d = rng.randint(0, degree)
            mono = {}
            for _ in range(d):
                v = rng.choice(variables)
                mono[v] = mono.get(v, 0) + 1
            items.append((tuple(sorted(mono.items())), random_rational(rng, bound)))
        p = MPoly.from_terms(items)
        if not p.is_zero():
            return FieldElem(RatFunc.from_poly(p))


def random_unit_poly(rng: random.Random, gens: Sequence[int], degree: int = 2, terms: int = 3) -> FieldElem:
    """A random polynomial with nonzero constant term (valuation exactly 0)."""
    p = random_poly(rng, gens, degree, terms)
    c = p.ratfunc.num.constant_value()
    if c:
        return p
    return p + random_rational(rng)


def sample_in_ball(
    rng: random.Random,
    center,
    radius: int,
    gens: Sequence[int],
    degree: int = 2,
    terms: int = 3,
) -> FieldElem:
    return FieldElem.coerce(center) + t_power(radius) * random_poly(rng, gens, degree, terms)
