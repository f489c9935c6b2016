import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from henselab.errors import InvalidElement
from henselab.field import canonical_derivation, const, gen, make_derivation, t_elem, t_power
from henselab.sampling import random_poly
from henselab.series import valuation
from henselab.topology import (
    Ball,
    BasicOpen,
    LazyDerivationFamily,
    TopologyDesc,
    addition_witness,
    boundedness_witness,
    check_witness,
    contains,
    inverse_witness,
    local_boundedness_witness,
    local_boundedness_witness_many,
    multiplication_witness,
    nondiscreteness_witness,
    sample_in_open,
    shrink_for_group_axioms,
    shrink_for_scaling,
    v_topology_witness,
)
from henselab.topology.axioms import BasisFamily, check_basis_axioms

t, e1, e2 = t_elem(), gen(1), gen(2)
d1, d2 = canonical_derivation(1), canonical_derivation(2)
GENS = (1, 2, 3)


def test_membership_examples():
    assert contains(BasicOpen(Ball(0, 1), ((d1, Ball(0, 1)),)), t * e1)
    assert not contains(Ball(0, 2), t)
    assert contains(Ball(1, 1), e1)


def test_basic_open_rejects_repeated_derivation():
    with pytest.raises(ValueError):
        BasicOpen(Ball(0, 1), ((d1, Ball(0, 1)), (d1, Ball(0, 2))))


def test_topology_descriptors():
    assert TopologyDesc.refined([]) == TopologyDesc.base()
    lazy = TopologyDesc.refined(LazyDerivationFamily())
    assert not lazy.is_finite and lazy.weight_bound == "countable"
    assert [D.id for D in lazy.finite_part(3)] == ["d1", "d2", "d3"]


@pytest.mark.parametrize("r,expected", [(2, 2), (0, 1), (5, 5)])
def test_shrink_for_group_axioms(r, expected):
    assert shrink_for_group_axioms(Ball(0, r)) == Ball(0, expected)


def test_shrink_for_group_axioms_on_samples():
    rng = random.Random(5)
    for r in (0, 1, 2, 4):
        V = Ball(0, r)
        U = shrink_for_group_axioms(V)
        for _ in range(100):
            u, u2 = sample_in_open(rng, U, GENS), sample_in_open(rng, U, GENS)
            assert V.contains(u - u2) and V.contains(u * u2)
            assert valuation(-u / (1 + u)) >= r


@pytest.mark.parametrize("lam,r", [(t_power(-3), 5), (const(1), 2), (t * t, 0)])
def test_shrink_for_scaling(lam, r):
    assert shrink_for_scaling(lam, Ball(0, 2)) == Ball(0, r)


def test_shrink_for_scaling_rejects_zero():
    with pytest.raises(InvalidElement):
        shrink_for_scaling(0, Ball(0, 2))


@pytest.mark.parametrize(
    "X,U,k", [(Ball(0, 0), Ball(0, 5), 5), (Ball(1, 0), Ball(0, 3), 3), (Ball(0, 2), Ball(0, 2), 0)]
)
def test_boundedness_witness(X, U, k):
    lam = boundedness_witness(X, U)
    assert lam == t_power(k)
    rng = random.Random(k)
    for _ in range(100):
        assert U.contains(lam * sample_in_open(rng, X, GENS))


@pytest.mark.parametrize("r,expected", [(1, 0), (0, 1), (5, -4)])
def test_v_topology_witness(r, expected):
    assert v_topology_witness(Ball(0, r)) == Ball(0, expected)


def test_nondiscreteness_examples():
    assert nondiscreteness_witness([d1, d2], Ball(0, 7)) == t_power(7)
    assert nondiscreteness_witness([], Ball(0, 1)) == t
    ddt = make_derivation({"t": 1})
    assert nondiscreteness_witness([ddt], Ball(0, 3)) == t_power(4)


@pytest.mark.parametrize(
    "U,D,P,lam", [(Ball(0, 1), d1, Ball(0, 9), t_power(8)), (Ball(0, 2), d2, Ball(0, 6), t_power(4))]
)
def test_local_boundedness_examples(U, D, P, lam):
    assert local_boundedness_witness(U, D, P) == lam


def test_local_boundedness_trivial_case():
    # Pstar already contains U ∩ D^-1(U)
    assert local_boundedness_witness(Ball(0, 0), d1, Ball(0, 0)) == const(1)


def test_local_boundedness_on_samples():
    rng = random.Random(11)
    U, P = Ball(0, 1), Ball(0, 5)
    for ds in ([d1], [d1, d2]):
        lam = local_boundedness_witness_many(U, ds, P)
        O = BasicOpen.around(0, 1, ds)
        for _ in range(100):
            x = lam * sample_in_open(rng, O, GENS)
            assert P.contains(x) and all(P.contains(D(x)) for D in ds)


@given(st.integers(-3, 6), st.integers(0, 10_000))
def test_membership_monotone_in_radius(r, seed):
    a = random_poly(random.Random(seed), GENS)
    if Ball(e1, r + 1).contains(a):
        assert Ball(e1, r).contains(a)


@pytest.mark.parametrize("ds", [(d1,), (d1, d2)])
def test_continuity_witnesses_hold(ds):
    rng = random.Random(3)
    for _ in range(30):
        a, b = random_poly(rng, GENS), random_poly(rng, GENS)
        r = rng.randint(0, 5)
        for w in (addition_witness(a, b, r, ds), multiplication_witness(a, b, r, ds), inverse_witness(a, r, ds)):
            assert check_witness(w, rng, GENS, trials=2) is None


def test_inverse_witness_rejects_zero():
    with pytest.raises(InvalidElement):
        inverse_witness(0, 1, [d1])


def test_axiom_examples():
    assert check_basis_axioms("t-adic-balls").passed
    assert check_basis_axioms("tau-d1").passed
    single = check_basis_axioms("singleton")
    assert [v.check for v in single.failures()] == ["axiom-4"]
    w = single.failures()[0].witness
    assert w["lam"] == str((1 / t).ratfunc) and w["u"] == "t"
    zero = check_basis_axioms("with-zero-set")
    assert [v.check for v in zero.failures()] == ["axiom-1"]


def test_bounded_window_family_fails_scaling():
    fam = BasisFamily("window", (d1,), 0, 3)
    rep = check_basis_axioms(fam)
    assert "axiom-4" in [v.check for v in rep.failures()]
