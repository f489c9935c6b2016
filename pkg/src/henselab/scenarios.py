"""Scenario pipelines: each takes a validated scenario dict and returns a Report."""

from __future__ import annotations

import random
from typing import Callable, Dict, Sequence

from .field import canonical_derivation, continuity_refutation
from .hensel import verify_gt_henselian
from .report import Report
from .sampling import random_poly
from .series import valuation
from .topology import (
    Ball,
    BasicOpen,
    LazyDerivationFamily,
    TopologyDesc,
    addition_witness,
    boundedness_witness,
    check_witness,
    inverse_witness,
    local_boundedness_witness,
    multiplication_witness,
    nondiscreteness_witness,
    sample_in_open,
)
from .topology.axioms import check_basis_axioms
from .witnesses import finiteness_demonstration, incomparable_topologies


def _ds(ids: Sequence[int]):
    return tuple(canonical_derivation(i) for i in ids)


def field_laws(ds, samples: int, seed: int, gens: Sequence[int], max_radius: int = 6) -> Report:
    """Continuity witnesses for +, * and inversion checked on seeded points."""
    rng = random.Random(seed)
    report = Report(f"field-laws {len(ds)} derivations", seed=seed)
    bad: Dict[str, dict] = {}
    for k in range(samples):
        a, b = random_poly(rng, gens), random_poly(rng, gens)
        r = rng.randint(0, max_radius)
        for op, w in (
            ("add", addition_witness(a, b, r, ds)),
            ("mul", multiplication_witness(a, b, r, ds)),
            ("inv", inverse_witness(a, r, ds)),
        ):
            hit = check_witness(w, rng, gens)
            if hit is not None and op not in bad:
                bad[op] = {"a": a.serialize(), "b": b.serialize(), "radius": r,
                           "inputs": [x.serialize() for x in hit]}
    for op in ("add", "mul", "inv"):
        report.add(f"continuity/{op}", op not in bad, samples=samples, **bad.get(op, {}))
    return report


def refutations(ds, depth: int) -> Report:
    """Every derivation is discontinuous for the t-adic topology at each N <= depth."""
    report = Report(f"strict-refinement depth={depth}")
    for D in ds:
        bad = None
        for N in range(1, depth + 1):
            a = continuity_refutation(D, N)
            if not (a.in_ball(0, N) and valuation(D(a)) <= 0):
                bad = {"N": N, "a": a.serialize()}
                break
        report.add(f"refutation/{D.id}", bad is None, depth=depth, **(bad or {}))
    return report


def nondiscreteness(ds, radii: Sequence[int]) -> Report:
    from itertools import combinations

    report = Report("nondiscreteness")
    subsets = [c for k in range(len(ds) + 1) for c in combinations(ds, k)]
    bad = None
    for sub in subsets:
        for r in radii:
            U = Ball(0, r)
            a = nondiscreteness_witness(sub, U)
            if a.is_zero() or not U.contains(a) or not all(U.contains(D(a)) for D in sub):
                bad = {"derivations": [D.id for D in sub], "radius": r, "a": a.serialize()}
                break
        if bad:
            break
    report.add("nondiscreteness", bad is None, subsets=len(subsets), radii=list(radii), **(bad or {}))
    return report


def run_gt_verify(sc: dict) -> Report:
    ds = _ds(sc.get("derivations", []))
    top = TopologyDesc.refined(ds)
    return verify_gt_henselian(
        top,
        sc.get("d_max", 3),
        sc.get("samples", 100),
        sc.get("seed", 0),
        prec=sc.get("prec", 16),
        radii=tuple(sc.get("radii", (0, 1, 2, 3, 4))),
        n_gens=sc.get("generators", 3),
        inject_outside_domain=sc.get("inject_outside_domain", False),
    )


def run_axioms(sc: dict) -> Report:
    return check_basis_axioms(sc.get("basis", "t-adic-balls"), sc.get("samples", 20), sc.get("seed", 0),
                              sc.get("d_max", 2))


def run_incomparable(sc: dict) -> Report:
    return incomparable_topologies(
        sc.get("m", 4),
        None,
        sc.get("samples", 100),
        sc.get("seed", 0),
        style=sc.get("style", "middle-layer"),
        radii=tuple(sc.get("radii", range(1, 9))),
        n_points=sc.get("points", 3),
        d_max=sc.get("d_max", 3),
    )


def run_witness(sc: dict) -> Report:
    ids = sc.get("derivations", [1, 2])
    ds = _ds(ids)
    seed = sc.get("seed", 0)
    gens = sorted(set(range(1, sc.get("generators", 3) + 1)) | set(ids))
    report = Report(sc.get("name", "witness"), seed=seed)
    report.extend(field_laws(ds, sc.get("samples", 200), seed, gens))
    report.extend(refutations(ds, sc.get("depth", 32)))
    report.extend(nondiscreteness(ds, sc.get("radii", list(range(17)))))
    return report


def local_boundedness_trials(D, pairs: int, samples: int, seed: int, gens: Sequence[int]) -> Report:
    """lambda * (U ∩ D^-1 U) ⊆ Pstar ∩ D^-1 Pstar on sampled points of seeded (U, Pstar)."""
    rng = random.Random(seed)
    report = Report(f"local-boundedness {D.id}", seed=seed)
    for k in range(pairs):
        ru, rp = rng.randint(0, 4), rng.randint(0, 10)
        U, Pstar = Ball(0, ru), Ball(0, rp)
        lam = local_boundedness_witness(U, D, Pstar)
        P = BasicOpen.around(0, ru, (D,))
        bad = None
        for _ in range(samples):
            a = sample_in_open(rng, P, gens)
            x = lam * a
            if not (Pstar.contains(x) and Pstar.contains(D(x))):
                bad = {"a": a.serialize()}
                break
        report.add(f"local-boundedness/{k}", bad is None, U=U.describe(), Pstar=Pstar.describe(),
                   lam=lam.serialize(), samples=samples, **(bad or {}))
    return report


def run_boundedness(sc: dict) -> Report:
    ids = sc.get("derivations", [1])
    seed = sc.get("seed", 0)
    gens = sorted(set(range(1, sc.get("generators", 3) + 1)) | set(ids))
    report = Report(sc.get("name", "boundedness"), seed=seed)
    rng = random.Random(seed)
    bad = None
    for _ in range(sc.get("pairs", 20)):
        X = Ball(random_poly(rng, gens), rng.randint(0, 4))
        U = Ball(0, rng.randint(0, 8))
        lam = boundedness_witness(X, U)
        x = sample_in_open(rng, X, gens)
        if not U.contains(lam * x):
            bad = {"X": X.describe(), "U": U.describe(), "x": x.serialize()}
            break
    report.add("bounded-balls", bad is None, **(bad or {}))
    for D in _ds(ids):
        report.extend(local_boundedness_trials(D, sc.get("pairs", 20), sc.get("samples", 100), seed, gens))
    report.extend(finiteness_demonstration(LazyDerivationFamily(), sc.get("family_size", 3)))
    return report


RUNNERS: Dict[str, Callable[[dict], Report]] = {
    "gt-verify": run_gt_verify,
    "axioms": run_axioms,
    "incomparable": run_incomparable,
    "witness": run_witness,
    "boundedness": run_boundedness,
}


def run(sc: dict) -> Report:
    report = RUNNERS[sc["kind"]](sc)
    report.scenario = sc.get("name", report.scenario)
    report.seed = sc.get("seed", 0)
    return report
