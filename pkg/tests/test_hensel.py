import random
from fractions import Fraction

import pytest

from henselab.errors import OutsideHenselDomain
from henselab.field import FieldElem, canonical_derivation, const, gen, make_derivation, t_elem
from henselab.hensel import (
    GtPoly,
    derivation_root_identity,
    gt_threshold,
    hensel_root,
    newton_iterates,
    root_derivative,
    verify_gt_henselian,
)
from henselab.report import OUTSIDE
from henselab.sampling import random_poly
from henselab.series import series_mod
from henselab.topology import Ball, TopologyDesc

from oracles import binomial_power, coeff_list, quadratic_root_oracle

t, e1 = t_elem(), gen(1)
d1, d2 = canonical_derivation(1), canonical_derivation(2)
N = 16


# --- examples ------------------------------------------------------------------

def test_lift_example():
    beta = hensel_root(GtPoly.of(t), 4).series(4)
    assert [beta.coefficient(k) for k in range(4)] == [-1, 1, 1, 2]


@pytest.mark.parametrize("alpha", [(0,), (0, 0)])
def test_factored_polynomials_give_minus_one(alpha):
    beta = hensel_root(GtPoly.of(*alpha), N).series(N)
    assert beta.to_dict() == {0: -1}


def test_root_derivative_examples():
    r = hensel_root(GtPoly.of(t * e1), N)
    s = series_mod(root_derivative(d1, r), 3)
    assert s.to_dict() == {1: 1, 2: 2}
    r2 = hensel_root(GtPoly.of(t), N)
    assert root_derivative(d1, r2).is_zero()


def test_root_derivative_matches_closed_form():
    # d1 of (-1 - sqrt(1 - 4 t e1))/2 is t (1 - 4 t e1)^(-1/2)
    r = hensel_root(GtPoly.of(t * e1), N)
    x = [-4 * c for c in coeff_list(t * e1, N)]
    expected = [Fraction(0)] + binomial_power(x, Fraction(-1, 2), N)[: N - 1]
    assert coeff_list(root_derivative(d1, r), N) == expected


def test_outside_domain():
    with pytest.raises(OutsideHenselDomain):
        hensel_root(GtPoly.of(1 + t))
    with pytest.raises(OutsideHenselDomain):
        hensel_root(GtPoly.of(t, e1))


def test_gtpoly_shape():
    with pytest.raises(ValueError):
        GtPoly(2, (t,))
    p = GtPoly.of(t, t * t)
    assert p.evaluate(-1) == t - t * t
    assert p.derivative_at(0) == t * t


@pytest.mark.parametrize(
    "d,U,V,s", [(0, Ball(-1, 3), Ball(0, 3), 3), (2, Ball(-1, 1), Ball(0, 1), 1), (0, Ball(-1, 0), Ball(0, 0), 1)]
)
def test_threshold_examples(d, U, V, s):
    assert gt_threshold(d, U, V, [d1]) == s


def test_threshold_holds_at_three_but_not_two():
    rng = random.Random(2)
    U, V = Ball(-1, 3), Ball(0, 3)
    for _ in range(100):
        a = t**3 * random_poly(rng, (1, 2))
        r = hensel_root(GtPoly.of(a), N)
        assert U.contains(r.element) and V.contains(root_derivative(d1, r))
    # below the threshold the derivative can escape V
    r = hensel_root(GtPoly.of(t * t * e1), N)
    assert not V.contains(root_derivative(d1, r))


def test_residual_simplicity_and_extension():
    rng = random.Random(4)
    for d in range(4):
        alpha = tuple(t * random_poly(rng, (1, 2)) for _ in range(d + 1))
        r = hensel_root(GtPoly(d, alpha), N)
        assert r.residual(N).is_zero()
        assert r.derivative_value(N).valuation == 0
        assert r.residual(2 * N).is_zero()
        assert r.series(2 * N).truncate(N) == r.series(N)


def test_quadratic_convergence():
    rng = random.Random(9)
    for _ in range(20):
        alpha = (t * random_poly(rng, (1,)), t * random_poly(rng, (2,)))
        its = newton_iterates(GtPoly(1, alpha), 64)
        gaps = [(b - a).valuation for a, b in zip(its, its[1:])]
        for g0, g1 in zip(gaps, gaps[1:]):
            if g0 >= 2:
                assert g1 >= 2 * g0 - 1


def test_derivation_root_identity_samples():
    rng = random.Random(6)
    D = make_derivation({"e1": 1, "e2": t})
    for d in range(3):
        alpha = tuple(t * random_poly(rng, (1, 2)) for _ in range(d + 1))
        assert derivation_root_identity(D, hensel_root(GtPoly(d, alpha)), N).is_zero()


def test_quadratic_oracle_agreement():
    rng = random.Random(8)
    for _ in range(10):
        a = t * random_poly(rng, (1, 2))
        beta = hensel_root(GtPoly.of(a), N).series(N)
        assert [beta.coefficient(k) for k in range(N)] == quadratic_root_oracle(a, N)


def test_root_is_an_analytic_field_element():
    r = hensel_root(GtPoly.of(t))
    beta = r.element
    assert beta.tier == "analytic"
    assert (beta * beta + beta + t).series(N).is_zero()
    # derivations pass through roots by the chain rule
    expected = beta + e1 * root_derivative(d1, r)
    assert series_mod(d1(beta * e1) - expected, N).is_zero()


@pytest.mark.parametrize("ds", [(), (d1,)])
def test_verify_passes(ds):
    rep = verify_gt_henselian(TopologyDesc.refined(ds), 3, 10, 1)
    assert rep.passed and len(rep.verdicts) == 4


def test_verify_records_outside_domain_gate():
    rep = verify_gt_henselian(TopologyDesc.base(), 0, 5, 1, inject_outside_domain=True)
    assert rep.verdicts[-1].status == OUTSIDE and rep.passed


def test_verify_lazy_family_needs_finite_part():
    from henselab.topology import LazyDerivationFamily

    top = TopologyDesc.refined(LazyDerivationFamily())
    rep = verify_gt_henselian(top, 1, 5, 0, finite_part=3)
    assert rep.passed
