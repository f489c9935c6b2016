"""Constructive witnesses: point search, the T-matrix density solver, refinement
refutations, antichains and finite families of pairwise incomparable topologies.

The density solver rests on one observation.  If x0..xn lie in Q(t), which
every derivation here kills, then a = x0 + x1 t1 + ... + xn tn satisfies

    (a, D1 a, ..., Dn a) = T (x0, ..., xn),

with T the matrix whose first row is (1, t1, ..., tn) and whose row j+1 is
(0, Dj t1, ..., Dj tn).  Solving T x = centers exactly over K and then
truncating each x_i to a Laurent polynomial in t moves the image by an amount
controlled by the valuations of T's entries.
"""

from __future__ import annotations

import itertools
import random
import weakref
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from .errors import BadBasisChoice, NoWitnessFound, UnsupportedTier
from .field import (
    Derivation,
    FieldElem,
    canonical_derivation,
    continuity_refutation,
    determinant,
    gen,
    linear_independence,
    solve,
    truncation,
)
from .hensel import verify_gt_henselian
from .report import Report
from .sampling import random_poly
from .series import INF, current_registry, valuation
from .topology.balls import (
    Ball,
    BasicOpen,
    LazyDerivationFamily,
    TopologyDesc,
    local_boundedness_witness_many,
)


def evaluation_matrix(fs: Sequence[Callable], points: Sequence) -> List[List[FieldElem]]:
    """Row j is (f_j(a_1), ..., f_j(a_n))."""
    return [[FieldElem.coerce(f(a)) for a in points] for f in fs]


def independent_points(fs: Sequence[Callable], pool: Sequence) -> List[FieldElem]:
    """First n-tuple from the pool (combinations in pool order) with nonzero evaluation determinant."""
    if not fs:
        raise ValueError("need at least one map")
    pool = [FieldElem.coerce(p) for p in pool]
    for combo in itertools.combinations(pool, len(fs)):
        if not determinant(evaluation_matrix(fs, combo)).is_zero():
            return list(combo)
    raise NoWitnessFound("no tuple in the pool has independent values")


@dataclass(frozen=True)
class TMatrix:
    n: int
    entries: Tuple[Tuple[FieldElem, ...], ...]
    ts: Tuple[FieldElem, ...]
    ds: Tuple[Derivation, ...]
    det: FieldElem

    def minor(self) -> List[List[FieldElem]]:
        return [list(row[1:]) for row in self.entries[1:]]


def build_T(ds: Sequence[Derivation], ts: Sequence) -> TMatrix:
    ds, ts = tuple(ds), tuple(FieldElem.coerce(x) for x in ts)
    if len(ds) != len(ts):
        raise ValueError("need as many points as derivations")
    one, zero = FieldElem.coerce(1), FieldElem.coerce(0)
    rows = [(one,) + ts] + [(zero,) + tuple(D(x) for x in ts) for D in ds]
    det = determinant(rows)
    if det.is_zero():
        raise BadBasisChoice("T is singular for these points")
    return TMatrix(len(ds), tuple(rows), ts, ds, det)


def _default_pool() -> List[FieldElem]:
    return [gen(i) for i in range(1, len(current_registry()) + 1)]


@dataclass
class _Solver:
    T: TMatrix
    inverse: List[List[FieldElem]]  # inverse[i][k]
    vals: List[List[float]]  # valuations of T entries


_SOLVERS: "weakref.WeakKeyDictionary[object, Dict[tuple, _Solver]]" = weakref.WeakKeyDictionary()


def _solver(ds: Sequence[Derivation]) -> _Solver:
    cache = _SOLVERS.setdefault(current_registry(), {})
    key = tuple(D.id for D in ds)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not linear_independence(ds).independent:
        raise BadBasisChoice("derivations are linearly dependent")
    for D in ds:
        if not D.value(0).is_zero():
            raise UnsupportedTier("density solver needs Q(t) inside every constant field")
    ts = independent_points(ds, _default_pool())
    T = build_T(ds, ts)
    n = T.n + 1
    cols = [solve(T.entries, [1 if i == k else 0 for i in range(n)]) for k in range(n)]
    inverse = [[cols[k][i] for k in range(n)] for i in range(n)]
    vals = [[valuation(x) for x in row] for row in T.entries]
    s = _Solver(T, inverse, vals)
    cache[key] = s
    return s


def _precisions(vals: List[List[float]], radii: Sequence[int]) -> List[int]:
    n = len(radii)
    out = []
    for i in range(n):
        need = [radii[k] - vals[k][i] for k in range(n) if vals[k][i] != INF]
        out.append(int(max(need)) if need else 0)
    return out


def dense_tuple(ds: Sequence[Derivation], targets: Sequence[Ball], max_bumps: int = 8) -> FieldElem:
    """a with a in targets[0] and D_j(a) in targets[j]; re-verified before it is returned."""
    ds = tuple(ds)
    if len(targets) != len(ds) + 1:
        raise ValueError("need one target ball per component")
    if not ds:
        a = truncation(targets[0].center, targets[0].radius)
        if targets[0].contains(a):
            return a
        raise NoWitnessFound("truncation left the target ball")
    sol = _solver(ds)
    n = len(targets)
    centers = [B.center for B in targets]
    exact = [sum((sol.inverse[i][k] * centers[k] for k in range(n)), FieldElem.coerce(0)) for i in range(n)]
    prec = _precisions(sol.vals, [B.radius for B in targets])
    for _ in range(max_bumps):
        xs = [truncation(x, p) for x, p in zip(exact, prec)]
        a = xs[0]
        for x, ti in zip(xs[1:], sol.T.ts):
            a = a + x * ti
        if targets[0].contains(a) and all(B.contains(D(a)) for D, B in zip(ds, targets[1:])):
            return a
        prec = [p + 1 for p in prec]
    raise NoWitnessFound("truncated solution missed the targets")


def refinement_refutation(
    J1: Sequence[Derivation],
    J2: Sequence[Derivation],
    query: BasicOpen,
    d: Derivation,
    Ustar: Ball,
) -> FieldElem:
    """A point of the tau_J2 basic open ``query`` whose d-value lands in Ustar."""
    if d.id not in {D.id for D in J1} or d.id in {D.id for D in J2}:
        raise ValueError("d must lie in J1 but not in J2")
    by_id = {D.id: B for D, B in query.constraints}
    j2 = tuple(J2)
    if set(by_id) != {D.id for D in j2}:
        raise ValueError("query must constrain exactly the derivations of J2")
    targets = [query.base] + [by_id[D.id] for D in j2] + [Ustar]
    a = dense_tuple(j2 + (d,), targets)
    if not (query.contains(a) and Ustar.contains(d(a))):
        raise NoWitnessFound("refutation failed verification")
    return a


@dataclass(frozen=True)
class Antichain:
    ground: Tuple[int, ...]
    members: Tuple[Tuple[int, ...], ...]

    def is_antichain(self) -> bool:
        sets = [set(m) for m in self.members]
        return all(not (a <= b) for i, a in enumerate(sets) for j, b in enumerate(sets) if i != j)


MIDDLE_LAYER = "middle-layer"
FUNCTION_GRAPHS = "function-graphs"


def antichain(ground_size: int, style: str = MIDDLE_LAYER) -> Antichain:
    """Members are subsets of {1..ground_size} that are pairwise incomparable."""
    if ground_size < 1:
        raise ValueError("ground set must be nonempty")
    ground = tuple(range(1, ground_size + 1))
    if style == MIDDLE_LAYER:
        k = max(ground_size // 2, 1)
        return Antichain(ground, tuple(itertools.combinations(ground, k)))
    if style == FUNCTION_GRAPHS:
        # index (x, b) in X x {0,1} as 2x + b + 1
        xs = range(ground_size // 2)
        members = []
        for f in itertools.product((0, 1), repeat=len(xs)):
            members.append(tuple(2 * x + f[x] + 1 for x in xs))
        return Antichain(ground[: 2 * len(xs)], tuple(members))
    raise ValueError(f"unknown antichain style {style!r}")


def _derivations(J: Sequence[int]) -> Tuple[Derivation, ...]:
    return tuple(canonical_derivation(i) for i in J)


def _label(J: Sequence[int]) -> str:
    return "{" + ",".join(f"d{i}" for i in J) + "}"


def refute_pair(
    J1: Sequence[int],
    J2: Sequence[int],
    points: Sequence[FieldElem],
    radii: Sequence[int],
) -> dict:
    """Refute that tau_J2 refines tau_J1 on every query open; returns verdict data."""
    d = canonical_derivation(min(set(J1) - set(J2)))
    ds1, ds2 = _derivations(J1), _derivations(J2)
    checked = 0
    for q in points:
        dq = d(q)
        U, Ustar = Ball(dq, 1), Ball(dq + 1, 1)
        for r in radii:
            query = BasicOpen.around(q, r, ds2)
            a = refinement_refutation(ds1, ds2, query, d, Ustar)
            da = d(a)
            if not query.contains(a) or not Ustar.contains(da) or U.contains(da):
                return {"ok": False, "derivation": d.id, "point": q.serialize(), "radius": r,
                        "a": a.serialize()}
            checked += 1
    return {"ok": True, "derivation": d.id, "queries": checked}


def incomparable_topologies(
    m: int,
    base: TopologyDesc | None = None,
    samples: int = 100,
    seed: int = 0,
    *,
    style: str = MIDDLE_LAYER,
    radii: Sequence[int] = tuple(range(1, 9)),
    n_points: int = 3,
    d_max: int = 3,
    refinement_depth: int = 8,
) -> Report:
    """Certify that the tau_J, J in an antichain on m derivations, are pairwise incomparable,
    gt-henselian, and strictly finer than the base topology."""
    base = base or TopologyDesc.base()
    if base.derivations:
        raise ValueError("the family is built over the base valuation topology")
    rng = random.Random(seed)
    ac = antichain(m, style)
    report = Report(f"incomparable m={m} {style}", seed=seed)
    report.add("antichain", ac.is_antichain(), members=[_label(J) for J in ac.members])
    gens = list(range(1, m + 1))
    points = [random_poly(rng, gens) for _ in range(n_points)]
    for J1, J2 in itertools.permutations(ac.members, 2):
        res = refute_pair(J1, J2, points, radii)
        ok = res.pop("ok")
        report.add(f"refute {_label(J2)} refines {_label(J1)}", ok, **res)
    for idx, J in enumerate(ac.members):
        top = TopologyDesc.refined(_derivations(J))
        gt = verify_gt_henselian(top, d_max, samples, seed + idx)
        fails = [v.check for v in gt.failures()]
        report.add(f"gt-henselian {top.name()}", not fails, d_max=d_max, samples=samples,
                   failed=fails)
        D = canonical_derivation(J[0])
        a = continuity_refutation(D, refinement_depth)
        ok = a.in_ball(0, refinement_depth) and valuation(D(a)) <= 0
        report.add(f"strictly finer {top.name()}", ok, derivation=D.id, N=refinement_depth,
                   a=a.serialize())
    return report


def finiteness_demonstration(family: LazyDerivationFamily, max_n: int, radius: int = 4) -> Report:
    """For each finite J = {D1..Dn}: tau_J is locally bounded (scaling witness) and
    D_{n+1} refutes tau_I = tau_J on a basic open around 0."""
    report = Report(f"locally-bounded-iff-finite n<={max_n}")
    U = Ball(0, 0)
    for n in range(1, max_n + 1):
        J = family.take(n)
        lam = local_boundedness_witness_many(U, J, Ball(0, radius))
        report.add(f"locally-bounded J={n}", not lam.is_zero(), lam=lam.serialize())
        d = family[n + 1]
        query = BasicOpen.around(0, radius, J)
        a = refinement_refutation(J + (d,), J, query, d, Ball(1, 1))
        report.add(f"tau_I differs from tau_J J={n}", query.contains(a) and Ball(1, 1).contains(d(a)),
                   derivation=d.id, a=a.serialize())
    return report
