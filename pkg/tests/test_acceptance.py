"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import random
import time

import pytest

from henselab.cli import execute
from henselab.errors import BadBasisChoice
from henselab.field import canonical_derivation, determinant, make_derivation, t_elem
from henselab.hensel import GtPoly, derivation_root_identity, hensel_root, verify_gt_henselian
from henselab.sampling import random_poly
from henselab.scenarios import field_laws, local_boundedness_trials, nondiscreteness, refutations
from henselab.series import current_registry
from henselab.topology import Ball, TopologyDesc
from henselab.topology.axioms import check_basis_axioms
from henselab.witnesses import build_T, dense_tuple, incomparable_topologies

from oracles import leibniz_det, quadratic_root_oracle

t = t_elem()
PREC = 16


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
        assert ok, detail

    return emit


def canon(*ids):
    return tuple(canonical_derivation(i) for i in ids)


def test_field_topology_laws(verdict):
    start = time.perf_counter()
    reports = [field_laws(canon(*range(1, n + 1)), 200, seed=n, gens=(1, 2, 3, 4)) for n in (1, 2, 3)]
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reports) and elapsed < 30
    verdict(1, ok, f"continuity witnesses for +, *, inverse; |I| = 1, 2, 3; 200 pairs each; {elapsed:.1f}s (< 30s)")


def test_strict_refinement(verdict):
    ds = canon(*range(1, len(current_registry()) + 1))
    rep = refutations(ds, 32)
    verdict(2, rep.passed, f"continuity_refutation for d1..d{len(ds)} at every N <= 32")


def test_nondiscreteness(verdict):
    rep = nondiscreteness(canon(1, 2, 3, 4), range(17))
    verdict(3, rep.passed, "nondiscreteness for radii 0..16 and all 16 subsets of {d1..d4}")


def test_gt_henselian(verdict):
    start = time.perf_counter()
    tops = [TopologyDesc.base(), TopologyDesc.refined(canon(1)), TopologyDesc.refined(canon(1, 2))]
    reports = [verify_gt_henselian(top, 3, 100, seed=40 + i, prec=PREC) for i, top in enumerate(tops)]
    elapsed = time.perf_counter() - start
    checks = sum(len(r.verdicts) for r in reports)
    ok = all(r.passed for r in reports) and checks == 12 and elapsed < 60
    verdict(4, ok, f"tau, tau_d1, tau_d1,d2 gt-henselian for d = 0..3, 100 samples each; {elapsed:.1f}s (< 60s)")


def test_derivation_root_identity(verdict):
    rng = random.Random(5)
    bad = 0
    for _ in range(50):
        d = rng.randint(0, 3)
        alpha = tuple(t * random_poly(rng, (1, 2, 3)) for _ in range(d + 1))
        D = make_derivation({"t": random_poly(rng, (1,)), "e1": random_poly(rng, (2,)), "e2": rng.randint(-2, 2)})
        if not derivation_root_identity(D, hensel_root(GtPoly(d, alpha), PREC), PREC).is_zero():
            bad += 1
    verdict(5, bad == 0, f"(Dp)(beta) + p'(beta) D(beta) = 0 mod t^16 on 50 samples ({bad} failures)")


def test_quadratic_oracle(verdict):
    rng = random.Random(6)
    bad = 0
    for _ in range(50):
        a = t * random_poly(rng, (1, 2, 3))
        beta = hensel_root(GtPoly.of(a), PREC).series(PREC)
        if [beta.coefficient(k) for k in range(PREC)] != quadratic_root_oracle(a, PREC):
            bad += 1
    verdict(6, bad == 0, f"d = 0 roots equal the quadratic-formula series mod t^16 on 50 samples ({bad} mismatches)")


def test_t_matrix_density(verdict):
    rng = random.Random(7)
    bases = 0
    det_ok = True
    while bases < 20:
        n = rng.randint(1, 3)
        ts = [random_poly(rng, (1, 2, 3, 4)) for _ in range(n)]
        try:
            T = build_T(canon(*range(1, n + 1)), ts)
        except BadBasisChoice:
            continue
        bases += 1
        det_ok &= T.det == determinant(T.minor()) and T.det == leibniz_det(T.entries)
    tuples_ok = 0
    for k in range(100):
        n = 1 + k % 3
        ds = canon(*rng.sample(range(1, 6), n))
        targets = [Ball(random_poly(rng, (1, 2, 3)), rng.randint(-2, 6)) for _ in range(n + 1)]
        a = dense_tuple(ds, targets)
        tuples_ok += targets[0].contains(a) and all(B.contains(D(a)) for D, B in zip(ds, targets[1:]))
    verdict(7, det_ok and tuples_ok == 100,
            f"det T = det(minor) on 20 bases; dense_tuple postcondition on {tuples_ok}/100 target tuples")


def test_incomparable_family(verdict):
    start = time.perf_counter()
    rep = incomparable_topologies(4, samples=100, seed=8)
    elapsed = time.perf_counter() - start
    refs = [v for v in rep.verdicts if v.check.startswith("refute")]
    gts = [v for v in rep.verdicts if v.check.startswith("gt-henselian")]
    queries = {v.witness.get("queries") for v in refs}
    ok = rep.passed and len(refs) == 30 and len(gts) == 6 and queries == {24} and elapsed < 120
    verdict(8, ok, f"m = 4: 6 topologies, {len(refs)} pair refutations x 24 queries, {len(gts)} gt-verifications; "
                   f"{elapsed:.1f}s (< 120s)")


def test_axiom_checklist(verdict):
    adic = check_basis_axioms("t-adic-balls", 20, 9)
    refined = check_basis_axioms("tau-d1", 20, 9)
    single = check_basis_axioms("singleton", 20, 9)
    ok = adic.passed and refined.passed and [v.check for v in single.failures()] == ["axiom-4"]
    verdict(9, ok, "t-adic and tau_d1 bases pass axioms 1-5; the singleton family fails axiom 4")


def test_local_boundedness(verdict):
    rep = local_boundedness_trials(canonical_derivation(1), 20, 100, seed=10, gens=(1, 2, 3))
    verdict(10, rep.passed and len(rep.verdicts) == 20,
            "lambda P inside Pstar ∩ d1^-1(Pstar) for 20 (U, Pstar) pairs x 100 points")


SCENARIOS = [
    {"kind": "gt-verify", "d_max": 2, "derivations": [1], "samples": 10, "seed": 11},
    {"kind": "axioms", "basis": "singleton", "seed": 11},
    {"kind": "incomparable", "m": 2, "samples": 5, "d_max": 1, "radii": [1, 2, 3], "seed": 11},
    {"kind": "witness", "derivations": [1, 2], "samples": 20, "depth": 8, "radii": [0, 3], "seed": 11},
    {"kind": "boundedness", "pairs": 4, "samples": 5, "family_size": 2, "seed": 11},
]


def test_determinism(verdict):
    same = [execute(sc).to_json() == execute(sc).to_json() for sc in SCENARIOS]
    verdict(11, all(same), f"byte-identical reruns for {sum(same)}/{len(SCENARIOS)} scenario kinds")
