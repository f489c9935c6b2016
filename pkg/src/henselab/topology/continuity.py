"""Continuity witnesses for +, * and inversion in the refined topologies.

Given a target basic open of radius r around f(a, b), each witness returns
radii for basic opens around the inputs whose image lands in the target.
The radii come from valuation bookkeeping on

    (a+h)(b+k) - ab = ak + bh + hk,
    D(1/(a+h)) - D(1/a) = (-a^2 D(h) + (2ah + h^2) D(a)) / (a^2 (a+h)^2),

and the callers re-check membership on sampled points.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from ..errors import InvalidElement
from ..field import Derivation, FieldElem
from ..series import INF, valuation
from .balls import BasicOpen, sample_in_open


@dataclass(frozen=True)
class ContinuityWitness:
    op: str
    target: BasicOpen
    inputs: tuple  # one BasicOpen per argument


def _finite_min(vals) -> float:
    vals = [v for v in vals if v != INF]
    return min(vals) if vals else INF


def addition_witness(a, b, r: int, ds: Sequence[Derivation]) -> ContinuityWitness:
    a, b = FieldElem.coerce(a), FieldElem.coerce(b)
    target = BasicOpen.around(a + b, r, ds)
    return ContinuityWitness("add", target, (BasicOpen.around(a, r, ds), BasicOpen.around(b, r, ds)))


def multiplication_witness(a, b, r: int, ds: Sequence[Derivation]) -> ContinuityWitness:
    a, b = FieldElem.coerce(a), FieldElem.coerce(b)
    m = _finite_min([valuation(a), valuation(b)] + [valuation(D(x)) for D in ds for x in (a, b)])
    s = math.ceil(r / 2) if m == INF else max(r - m, math.ceil(r / 2))
    target = BasicOpen.around(a * b, r, ds)
    return ContinuityWitness("mul", target, (BasicOpen.around(a, s, ds), BasicOpen.around(b, s, ds)))


def inverse_witness(a, r: int, ds: Sequence[Derivation]) -> ContinuityWitness:
    a = FieldElem.coerce(a)
    if a.is_zero():
        raise InvalidElement("inversion is continuous on nonzero points only")
    va = valuation(a)
    s = max(va + 1, r + 2 * va)
    for D in ds:
        vda = valuation(D(a))
        if vda != INF:
            s = max(s, r + 3 * va - vda, math.ceil((r + 4 * va - vda) / 2))
    target = BasicOpen.around(a.inverse(), r, ds)
    return ContinuityWitness("inv", target, (BasicOpen.around(a, s, ds),))


def check_witness(w: ContinuityWitness, rng: random.Random, gens: Sequence[int], trials: int = 1):
    """Sample inputs inside the witness opens; return the first violating tuple or None."""
    for _ in range(trials):
        xs = [sample_in_open(rng, O, gens) for O in w.inputs]
        if w.op == "add":
            y = xs[0] + xs[1]
        elif w.op == "mul":
            y = xs[0] * xs[1]
        else:
            y = xs[0].inverse()
        if not w.target.contains(y):
            return xs
    return None
