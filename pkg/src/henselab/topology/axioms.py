"""Checker for the five neighborhood-basis axioms of a gt-henselian topology.

A family is described by the radii it allows and the derivations it refines
by; each member is the basic open of that radius around 0 in every
component.  Axioms (3) and (4) are certified by the shrink operations and
then re-checked on samples; axiom (5) uses the Hensel threshold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from ..errors import OutsideHenselDomain
from ..field import Derivation, FieldElem, canonical_derivation, gen, t_elem, t_power
from ..report import Report
from .balls import (
    Ball,
    BasicOpen,
    nondiscreteness_witness,
    sample_in_open,
    shrink_open_for_group_axioms,
    shrink_open_for_scaling,
)


@dataclass(frozen=True)
class BasisFamily:
    """{BasicOpen.around(0, r, derivations) : r allowed}, optionally plus the set {0}.

    ``max_radius=None`` means every radius >= min_radius is allowed.
    """

    name: str
    derivations: Tuple[Derivation, ...] = ()
    min_radius: int = 0
    max_radius: Optional[int] = None
    include_zero_set: bool = False
    gens: Tuple[int, ...] = field(default=(1, 2))

    def allows(self, r: int) -> bool:
        return r >= self.min_radius and (self.max_radius is None or r <= self.max_radius)

    def member(self, r: int) -> BasicOpen:
        if not self.allows(r):
            raise ValueError(f"radius {r} is not in the family")
        return BasicOpen.around(0, r, self.derivations)

    def smallest_within(self, r: int) -> Optional[int]:
        """Least allowed radius >= r (the largest member inside radius r), or None."""
        cand = max(r, self.min_radius)
        return cand if self.allows(cand) else None

    def sample_radius(self, rng: random.Random, span: int = 6) -> int:
        hi = self.max_radius if self.max_radius is not None else self.min_radius + span
        return rng.randint(self.min_radius, hi)


def named_family(name: str) -> BasisFamily:
    """The built-in families used by scenarios."""
    if name == "t-adic-balls":
        return BasisFamily(name)
    if name == "tau-d1":
        return BasisFamily(name, (canonical_derivation(1),))
    if name == "tau-d1-d2":
        return BasisFamily(name, (canonical_derivation(1), canonical_derivation(2)))
    if name == "singleton":
        return BasisFamily(name, (), 1, 1)
    if name == "with-zero-set":
        return BasisFamily(name, (), 0, None, True)
    raise KeyError(name)


FAMILY_NAMES = ("t-adic-balls", "tau-d1", "tau-d1-d2", "singleton", "with-zero-set")


def _sample(rng, fam: BasisFamily, O: BasicOpen) -> FieldElem:
    return sample_in_open(rng, O, fam.gens)


def _axiom1(fam: BasisFamily, rng, samples: int, report: Report) -> None:
    if fam.include_zero_set:
        report.add("axiom-1", False, reason="the set {0} is a member")
        return
    for _ in range(min(samples, 10)):
        r = fam.sample_radius(rng)
        O = fam.member(r)
        if not O.contains(0):
            report.add("axiom-1", False, reason="member misses 0", radius=r)
            return
        # a nonzero member element rules out O = {0}
        a = nondiscreteness_witness(fam.derivations, Ball(0, r))
        if not O.contains(a):
            report.add("axiom-1", False, reason="member is {0}", radius=r)
            return
    r1 = fam.smallest_within(1)
    if r1 is None or fam.member(r1).contains(1):
        report.add("axiom-1", False, reason="every member contains 1")
        return
    report.add("axiom-1", True, excludes_one_at_radius=r1)


def _axiom2(fam: BasisFamily, rng, samples: int, report: Report) -> None:
    for _ in range(min(samples, 10)):
        r, r2 = fam.sample_radius(rng), fam.sample_radius(rng)
        ru = fam.smallest_within(max(r, r2))
        if ru is None:
            report.add("axiom-2", False, radii=[r, r2])
            return
        U, V, W = fam.member(ru), fam.member(r), fam.member(r2)
        for _ in range(max(1, samples // 10)):
            u = _sample(rng, fam, U)
            if not (V.contains(u) and W.contains(u)):
                report.add("axiom-2", False, radii=[r, r2], u=u.serialize())
                return
    report.add("axiom-2", True, rule="intersection of radii r, r' is the member of radius max(r, r')")


def _axiom3(fam: BasisFamily, rng, samples: int, report: Report) -> None:
    for _ in range(min(samples, 10)):
        r = fam.sample_radius(rng)
        V = fam.member(r)
        s = fam.smallest_within(shrink_open_for_group_axioms(V).base.radius)
        if s is None:
            report.add("axiom-3", False, V_radius=r, reason="no member small enough")
            return
        U = fam.member(s)
        for _ in range(max(1, samples // 10)):
            u, u2 = _sample(rng, fam, U), _sample(rng, fam, U)
            w = -u / (1 + u)  # (1+u)^-1 = 1 + w
            for what, x in (("difference", u - u2), ("product", u * u2), ("inverse", w)):
                if not V.contains(x):
                    report.add("axiom-3", False, V_radius=r, U_radius=s, part=what,
                               u=u.serialize(), u2=u2.serialize())
                    return
    report.add("axiom-3", True)


def _scalars(fam: BasisFamily):
    t = t_elem()
    out = [FieldElem.coerce(1), t, 1 / t, t_power(-3), t * t]
    if fam.gens:
        e = gen(fam.gens[0])
        out += [e, t * e, 1 / (t * e)]
    return out


def _axiom4(fam: BasisFamily, rng, samples: int, report: Report) -> None:
    for lam in _scalars(fam):
        for _ in range(3):
            r = fam.sample_radius(rng)
            V = fam.member(r)
            need = shrink_open_for_scaling(lam, V).base.radius
            s = fam.smallest_within(need)
            if s is None:
                # no member is small enough; exhibit an escaping point of every candidate
                cands = [q for q in range(fam.min_radius, need) if fam.allows(q)]
                q = cands[-1] if cands else fam.min_radius
                u = nondiscreteness_witness(fam.derivations, Ball(0, q))
                report.add("axiom-4", False, lam=lam.serialize(),
                           V_radius=r, required_radius=need, u=u.serialize(),
                           lam_u=(lam * u).serialize())
                return
            U = fam.member(s)
            for _ in range(max(1, samples // 10)):
                u = _sample(rng, fam, U)
                if not V.contains(lam * u):
                    report.add("axiom-4", False, lam=lam.serialize(), V_radius=r, U_radius=s,
                               u=u.serialize())
                    return
    report.add("axiom-4", True, scalars=[x.serialize() for x in _scalars(fam)])


def _axiom5(fam: BasisFamily, rng, samples: int, d_max: int, report: Report) -> None:
    from ..hensel import GtPoly, gt_threshold, hensel_root

    for d in range(d_max + 1):
        r = fam.sample_radius(rng)
        V = fam.member(r)
        need = gt_threshold(d, Ball(-1, r), Ball(0, r), fam.derivations)
        s = fam.smallest_within(need)
        if s is None:
            report.add("axiom-5", False, d=d, V_radius=r, reason="no member reaches the threshold")
            return
        U = fam.member(s)
        for _ in range(max(1, samples // 10)):
            alpha = tuple(_sample(rng, fam, U) for _ in range(d + 1))
            try:
                root = hensel_root(GtPoly(d, alpha))
            except OutsideHenselDomain as exc:
                report.add("axiom-5", False, d=d, reason=str(exc))
                return
            simple = root.derivative_value(1).offset == 0
            if not (simple and V.contains(root.element + 1)):
                report.add("axiom-5", False, d=d, V_radius=r, U_radius=s,
                           alpha=[a.serialize() for a in alpha])
                return
    report.add("axiom-5", True, d_max=d_max)


def check_basis_axioms(family: BasisFamily | str, samples: int = 20, seed: int = 0, d_max: int = 2) -> Report:
    """One verdict per axiom (1)-(5); failures carry a counterexample."""
    fam = named_family(family) if isinstance(family, str) else family
    rng = random.Random(seed)
    report = Report(f"basis-axioms {fam.name}", seed=seed)
    _axiom1(fam, rng, samples, report)
    _axiom2(fam, rng, samples, report)
    _axiom3(fam, rng, samples, report)
    _axiom4(fam, rng, samples, report)
    _axiom5(fam, rng, samples, d_max, report)
    return report
