import random

import pytest

from henselab.errors import BadBasisChoice, NoWitnessFound
from henselab.field import FieldElem, canonical_derivation, const, determinant, gen, t_elem, truncation
from henselab.sampling import random_poly
from henselab.topology import Ball, BasicOpen, LazyDerivationFamily
from henselab.witnesses import (
    antichain,
    build_T,
    dense_tuple,
    evaluation_matrix,
    finiteness_demonstration,
    incomparable_topologies,
    independent_points,
    refinement_refutation,
)

from oracles import leibniz_det

t, e1, e2 = t_elem(), gen(1), gen(2)
d1, d2, d3 = (canonical_derivation(i) for i in (1, 2, 3))


def test_independent_points_examples():
    assert independent_points([d1, d2], [e1, e2, t]) == [e1, e2]
    with pytest.raises(NoWitnessFound):
        independent_points([d1, d1], [e1, e2, t])
    pts = independent_points([d1 + d2, d2], [e1, e2])
    assert pts == [e1, e2]
    m = evaluation_matrix([d1 + d2, d2], pts)
    assert [[x.ratfunc for x in row] for row in m] == [[const(1).ratfunc] * 2, [const(0).ratfunc, const(1).ratfunc]]


def test_build_T_examples():
    assert build_T([d1], [e1]).det == const(1)
    assert build_T([d1, d2], [e1, e2]).det == const(1)
    T = build_T([d1, d2], [e1 + e2, e1])
    assert T.det == const(-1)
    assert T.entries[0] == (const(1), e1 + e2, e1)


def test_build_T_singular():
    with pytest.raises(BadBasisChoice):
        build_T([d1, d2], [e1, e1 + t])


def test_determinant_reduction_random_bases():
    rng = random.Random(0)
    for _ in range(5):
        ts = [random_poly(rng, (1, 2, 3)) for _ in range(3)]
        try:
            T = build_T([d1, d2, d3], ts)
        except BadBasisChoice:
            continue
        assert T.det == determinant(T.minor())
        assert T.det == leibniz_det(T.entries)


def test_dense_tuple_examples():
    assert dense_tuple([d1], [Ball(1, 2), Ball(0, 2)]) == const(1)
    targets = [Ball(e1, 3), Ball(1, 3)]
    a = dense_tuple([d1], targets)
    assert targets[0].contains(a) and targets[1].contains(d1(a))
    targets = [Ball(0, 1), Ball(1, 1), Ball(1, 1)]
    a = dense_tuple([d1, d2], targets)
    assert targets[0].contains(a) and targets[1].contains(d1(a)) and targets[2].contains(d2(a))


def test_graph_map_column_identity():
    # for x in Q(t): D_j(x0 + sum x_i t_i) = sum x_i D_j(t_i)
    T = build_T([d1, d2], [e1 + e2, e1 * e2])
    xs = [1 + t, t / (1 - t), const(3)]
    a = xs[0] + xs[1] * T.ts[0] + xs[2] * T.ts[1]
    for j, D in enumerate([d1, d2], start=1):
        rhs = sum((x * T.entries[j][i] for i, x in enumerate(xs)), const(0))
        assert D(a) == rhs


def test_dense_tuple_random_targets():
    rng = random.Random(1)
    for n in (1, 2, 3):
        ds = [d1, d2, d3][:n]
        for _ in range(5):
            targets = [Ball(random_poly(rng, (1, 2, 3)), rng.randint(-1, 5)) for _ in range(n + 1)]
            a = dense_tuple(ds, targets)
            assert targets[0].contains(a)
            assert all(B.contains(D(a)) for D, B in zip(ds, targets[1:]))


def test_refinement_refutation_examples():
    for k in (1, 3, 5):
        q = BasicOpen.around(e1, k, [d2])
        a = refinement_refutation([d1], [d2], q, d1, Ball(0, 1))
        assert a == truncation(e1, k)
        assert q.contains(a) and d1(a).is_zero()
    assert refinement_refutation([d1], [], BasicOpen(Ball(e1, 2)), d1, Ball(0, 1)) == 1 + t
    q = BasicOpen.around(e2, 3, [d1])
    a = refinement_refutation([d2], [d1], q, d2, Ball(0, 1))
    assert a == truncation(e2, 3)


def test_refinement_refutation_rejects_shared_derivation():
    with pytest.raises(ValueError):
        refinement_refutation([d1], [d1], BasicOpen.around(0, 1, [d1]), d1, Ball(0, 1))


def test_antichain_examples():
    mid = antichain(4)
    assert len(mid.members) == 6 and all(len(m) == 2 for m in mid.members)
    graphs = antichain(4, "function-graphs")
    assert len(graphs.members) == 4
    assert antichain(2).members == ((1,), (2,))
    for ac in (mid, graphs, antichain(5), antichain(6, "function-graphs")):
        assert ac.is_antichain()


def test_incomparable_small_cases():
    rep = incomparable_topologies(2, samples=5, seed=1, d_max=1, radii=(1, 2))
    assert rep.passed
    assert sum(v.check.startswith("refute") for v in rep.verdicts) == 2
    rep1 = incomparable_topologies(1, samples=5, seed=1, d_max=0)
    assert rep1.passed
    assert sum(v.check.startswith("refute") for v in rep1.verdicts) == 0


def test_finiteness_demonstration():
    rep = finiteness_demonstration(LazyDerivationFamily(), 3)
    assert rep.passed and len(rep.verdicts) == 6
