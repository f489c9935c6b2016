"""Valuation balls, basic opens of the refined topologies, and ball-algebra witnesses.

A ball is {x : v(x - c) >= r} with integer r.  The basic opens of the topology
refined by derivations D1..Dn are  B0 ∩ D1^-1(B1) ∩ ... ∩ Dn^-1(Bn).  Because
the valuation is ultrametric, most neighborhood statements reduce to integer
inequalities between radii; every witness here is also re-checked on concrete
elements before it leaves the function.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Tuple

from ..errors import InvalidElement, NoWitnessFound
from ..field import Derivation, FieldElem, canonical_derivation, t_power
from ..sampling import random_poly
from ..series import INF, valuation


@dataclass(frozen=True)
class Ball:
    center: FieldElem
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "center", FieldElem.coerce(self.center))
        if not isinstance(self.radius, int):
            raise TypeError("ball radii are integers")

    def contains(self, a) -> bool:
        return FieldElem.coerce(a).in_ball(self.center, self.radius)

    @property
    def centered_at_zero(self) -> bool:
        return self.center.is_symbolic and self.center.ratfunc.is_zero()

    def describe(self) -> dict:
        return {"center": self.center.serialize(), "radius": self.radius}

    def __str__(self) -> str:
        return f"Ball({self.center}, {self.radius})"


@dataclass(frozen=True)
class BasicOpen:
    base: Ball
    constraints: Tuple[Tuple[Derivation, Ball], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        ids = [D.id for D, _ in self.constraints]
        if len(ids) != len(set(ids)):
            raise ValueError("derivations in a basic open must be pairwise distinct")

    @classmethod
    def around(cls, point, radius: int, ds: Sequence[Derivation] = ()) -> "BasicOpen":
        """The basic open of the given radius around ``point`` in every component."""
        point = FieldElem.coerce(point)
        return cls(Ball(point, radius), tuple((D, Ball(D(point), radius)) for D in ds))

    @property
    def derivations(self) -> Tuple[Derivation, ...]:
        return tuple(D for D, _ in self.constraints)

    def contains(self, a) -> bool:
        a = FieldElem.coerce(a)
        if not self.base.contains(a):
            return False
        return all(B.contains(D(a)) for D, B in self.constraints)

    def describe(self) -> dict:
        return {
            "base": self.base.describe(),
            "constraints": [{"derivation": D.id, "ball": B.describe()} for D, B in self.constraints],
        }


def contains(O, a) -> bool:
    """Membership of a in a Ball or BasicOpen."""
    return O.contains(a)


def as_basic_open(O) -> BasicOpen:
    return O if isinstance(O, BasicOpen) else BasicOpen(O)


class LazyDerivationFamily:
    """A countable family of derivations indexed 1, 2, ... and built on demand."""

    def __init__(self, factory: Callable[[int], Derivation] = canonical_derivation):
        self.factory = factory

    def __getitem__(self, i: int) -> Derivation:
        if i < 1:
            raise IndexError("family is indexed from 1")
        return self.factory(i)

    def take(self, n: int) -> Tuple[Derivation, ...]:
        return tuple(self.factory(i) for i in range(1, n + 1))

    def __iter__(self) -> Iterator[Derivation]:
        i = 1
        while True:
            yield self.factory(i)
            i += 1


BASE_VALUATION = "base-valuation"
DERIVATION_REFINED = "derivation-refined"


@dataclass(frozen=True)
class TopologyDesc:
    """The t-adic topology, or its refinement pulled back along a -> (a, (D a)_D).

    ``derivations`` is a finite tuple or a LazyDerivationFamily.  The weight
    tag records the bound weight <= |I| + weight(base): finite families keep
    the base's countable weight, as does a countable family.
    """

    kind: str
    derivations: object = ()
    weight_bound: str = "countable"

    @classmethod
    def base(cls) -> "TopologyDesc":
        return cls(BASE_VALUATION, ())

    @classmethod
    def refined(cls, ds) -> "TopologyDesc":
        if isinstance(ds, LazyDerivationFamily):
            return cls(DERIVATION_REFINED, ds, "countable")
        ds = tuple(ds)
        if not ds:
            return cls.base()
        return cls(DERIVATION_REFINED, ds, "countable")

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.derivations, LazyDerivationFamily)

    def finite_part(self, n: int | None = None) -> Tuple[Derivation, ...]:
        if isinstance(self.derivations, LazyDerivationFamily):
            if n is None:
                raise ValueError("a lazily indexed family needs an explicit finite subset size")
            return self.derivations.take(n)
        return tuple(self.derivations) if n is None else tuple(self.derivations)[:n]

    def basic_open(self, point, radius: int, n: int | None = None) -> BasicOpen:
        return BasicOpen.around(point, radius, self.finite_part(n))

    def name(self) -> str:
        if self.kind == BASE_VALUATION:
            return "tau"
        if not self.is_finite:
            return "tau_{d1,d2,...}"
        return "tau_{" + ",".join(D.id for D in self.derivations) + "}"


# ---------------------------------------------------------------------------
# sampling inside basic opens


def sample_in_open(
    rng: random.Random,
    O,
    gens: Sequence[int],
    degree: int = 2,
    terms: int = 3,
    max_bump: int = 64,
) -> FieldElem:
    """A seeded point of O of the form center + t^s * P, raising s until it lands inside."""
    O = as_basic_open(O)
    s = max([O.base.radius] + [B.radius for _, B in O.constraints])
    p = random_poly(rng, gens, degree, terms)
    for bump in range(max_bump):
        x = O.base.center + t_power(s + bump) * p
        if O.contains(x):
            return x
    raise NoWitnessFound("could not place a sample inside the basic open")


# ---------------------------------------------------------------------------
# ball algebra witnesses


def _require_zero_center(B: Ball, what: str) -> None:
    if not B.centered_at_zero:
        raise ValueError(f"{what} must be centered at 0")


def shrink_for_group_axioms(V: Ball) -> Ball:
    """U with U - U, U*U ⊆ V and (1+U)^-1 ⊆ (1+V)^-1.

    With s = max(r, 1): v(u - u') >= s >= r, v(u u') >= 2s >= r, and
    (1+u)^-1 = 1 + w with w = -u/(1+u), v(w) = v(u) >= s.
    """
    _require_zero_center(V, "V")
    return Ball(0, max(V.radius, 1))


def shrink_open_for_group_axioms(V: BasicOpen) -> BasicOpen:
    """Same recipe on a basic open centered at 0 in every component.

    For w = -u/(1+u): D(w) = -D(u)/(1+u)^2 has the valuation of D(u); and
    D(u u') = u D(u') + u' D(u) has valuation >= 2s.
    """
    radii = [V.base.radius] + [B.radius for _, B in V.constraints]
    for B in [V.base] + [B for _, B in V.constraints]:
        _require_zero_center(B, "V")
    s = max(max(radii), 1)
    return BasicOpen.around(0, s, V.derivations)


def shrink_for_scaling(lam, V: Ball) -> Ball:
    """U = Ball(0, r - v(lam)), so that lam * U = V exactly."""
    _require_zero_center(V, "V")
    lam = FieldElem.coerce(lam)
    if lam.is_zero():
        raise InvalidElement("scaling by zero")
    return Ball(0, V.radius - valuation(lam))


def shrink_open_for_scaling(lam, V: BasicOpen) -> BasicOpen:
    """Uniform radius s with lam * U ⊆ V for a basic open centered at 0.

    D(lam u) = lam D(u) + u D(lam) needs s + v(lam) >= r_D and s + v(D lam) >= r_D.
    """
    lam = FieldElem.coerce(lam)
    if lam.is_zero():
        raise InvalidElement("scaling by zero")
    vl = valuation(lam)
    need = [V.base.radius - vl]
    for D, B in V.constraints:
        _require_zero_center(B, "V")
        need.append(B.radius - vl)
        vdl = valuation(D(lam))
        if vdl != INF:
            need.append(B.radius - vdl)
    return BasicOpen.around(0, max(need), V.derivations)


def boundedness_witness(X: Ball, U: Ball) -> FieldElem:
    """lam = t^k with lam * X ⊆ U (every x in X has v(x) >= min(v(center), radius))."""
    _require_zero_center(U, "U")
    vc = valuation(X.center)
    floor = min(vc, X.radius)
    k = max(0, U.radius - floor)
    return t_power(k)


def v_topology_witness(U: Ball) -> Ball:
    """A ball containing (K minus U)^-1: v(x) < r implies v(1/x) > -r."""
    _require_zero_center(U, "U")
    return Ball(0, 1 - U.radius)


def nondiscreteness_witness(ds: Sequence[Derivation], U: Ball, search: int = 64) -> FieldElem:
    """A nonzero a with a in U and D(a) in U for every D (a = t^k)."""
    _require_zero_center(U, "U")
    r = U.radius
    k = r
    for D in ds:
        dt = D.value(0)
        if not dt.is_zero():
            k = max(k, r + 1 - valuation(dt))
    for kk in range(k, k + search):
        a = t_power(kk)
        if U.contains(a) and all(U.contains(D(a)) for D in ds):
            return a
    raise NoWitnessFound("no power of t lies in the intersection")


@dataclass(frozen=True)
class LocalBoundednessWitness:
    lam: FieldElem
    Q: Ball
    V: Ball


def local_boundedness_construction(U: Ball, D: Derivation, Pstar: Ball) -> LocalBoundednessWitness:
    """lam with lam * (U ∩ D^-1 U) ⊆ Pstar ∩ D^-1 Pstar.

    Q = Pstar works for Q + Q ⊆ Pstar (ultrametric); V = Ball(0, q - u) gives
    V*U ⊆ Q; lam is a nonzero point of V ∩ D^-1(V).  Then
    D(lam a) = lam D(a) + a D(lam) lies in Q + Q.
    """
    _require_zero_center(U, "U")
    _require_zero_center(Pstar, "Pstar")
    Q = Ball(0, Pstar.radius)
    V = Ball(0, Q.radius - U.radius)
    lam = nondiscreteness_witness([D], V)
    return LocalBoundednessWitness(lam, Q, V)


def local_boundedness_witness(U: Ball, D: Derivation, Pstar: Ball) -> FieldElem:
    return local_boundedness_construction(U, D, Pstar).lam


def local_boundedness_witness_many(U: Ball, ds: Sequence[Derivation], Pstar: Ball) -> FieldElem:
    """Finite families: iterate the singleton recipe with V ∩ D^-1(V) for all D at once."""
    _require_zero_center(U, "U")
    _require_zero_center(Pstar, "Pstar")
    V = Ball(0, Pstar.radius - U.radius)
    return nondiscreteness_witness(ds, V)
