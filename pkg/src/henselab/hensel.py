"""Newton lifting of the simple root near -1 of x^(d+2) + x^(d+1) + a_d x^d + ... + a_0.

When every a_i has positive valuation, p(-1) has positive valuation and
p'(-1) = (-1)^(d+1) is a unit, so Newton's iteration from -1 converges
quadratically in Q[[t]] to a simple root.  Roots are kept as lazily extended
series and enter the field as analytic-tier leaves.  Their derivative under a
derivation D is forced by differentiating p(beta) = 0:

    D(beta) = -(D p)(beta) / p'(beta),

where D p applies D to each coefficient.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .errors import OutsideHenselDomain, PrecisionExhausted
from .field import Derivation, FieldElem
from .report import OUTSIDE, Report
from .series import TruncSeries, prec_max, series_mod
from .topology.balls import Ball, BasicOpen, TopologyDesc, sample_in_open

DEFAULT_ROOT_PREC = 16


@dataclass(frozen=True)
class GtPoly:
    """x^(d+2) + x^(d+1) + alpha[d] x^d + ... + alpha[0]."""

    d: int
    alpha: Tuple[FieldElem, ...]

    def __post_init__(self):
        alpha = tuple(FieldElem.coerce(a) for a in self.alpha)
        if self.d < 0 or len(alpha) != self.d + 1:
            raise ValueError("need d >= 0 and exactly d+1 coefficients")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def of(cls, *alpha) -> "GtPoly":
        return cls(len(alpha) - 1, tuple(alpha))

    def coefficients(self) -> List[FieldElem]:
        """All coefficients c_0..c_(d+2)."""
        return list(self.alpha) + [FieldElem.coerce(1), FieldElem.coerce(1)]

    def coefficient_series(self, prec: int) -> List[TruncSeries]:
        return [series_mod(c, prec) for c in self.coefficients()]

    def derived(self, D: Derivation) -> List[FieldElem]:
        """Coefficients of D p (the leading 1s are killed)."""
        return [D(a) for a in self.alpha]

    def evaluate(self, x) -> FieldElem:
        x = FieldElem.coerce(x)
        acc = FieldElem.coerce(0)
        for c in reversed(self.coefficients()):
            acc = acc * x + c
        return acc

    def derivative_at(self, x) -> FieldElem:
        x = FieldElem.coerce(x)
        cs = self.coefficients()
        acc = FieldElem.coerce(0)
        for i in range(len(cs) - 1, 0, -1):
            acc = acc * x + cs[i] * i
        return acc

    def serialize(self) -> str:
        d = self.d
        parts = [f"x^{d + 2}", f"x^{d + 1}" if d + 1 > 1 else "x"]
        for i in range(d, -1, -1):
            mon = "" if i == 0 else ("*x" if i == 1 else f"*x^{i}")
            parts.append(f"({self.alpha[i].serialize()}){mon}")
        return " + ".join(parts)


def _horner(coeffs: Sequence[TruncSeries], x: TruncSeries) -> TruncSeries:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _horner_derivative(coeffs: Sequence[TruncSeries], x: TruncSeries) -> TruncSeries:
    n = len(coeffs) - 1
    acc = coeffs[n].scale(n)
    for i in range(n - 1, 0, -1):
        acc = acc * x + coeffs[i].scale(i)
    return acc


def newton_iterates(poly: GtPoly, prec: int, start: TruncSeries | None = None, max_steps: int = 64):
    """Newton iterates beta_0 = -1, beta_1, ... modulo t^prec until the residual vanishes."""
    coeffs = poly.coefficient_series(prec)
    beta = start if start is not None else TruncSeries.exact({0: Fraction(-1)}, prec)
    beta = TruncSeries.make(beta.offset, beta.coeffs, prec)
    iterates = [beta]
    for _ in range(max_steps):
        value = _horner(coeffs, beta)
        if value.is_zero():
            return iterates
        slope = _horner_derivative(coeffs, beta)
        if slope.offset != 0:
            raise OutsideHenselDomain("p'(beta) is not a unit")
        beta = (beta - value / slope).truncate(prec)
        iterates.append(beta)
    raise PrecisionExhausted("Newton iteration did not settle")


class HenselRoot:
    """The simple root beta of a GtPoly with beta = -1 mod t, extendable to any precision."""

    def __init__(self, poly: GtPoly):
        self.poly = poly
        self._lock = threading.Lock()
        self._series: TruncSeries | None = None
        self.simplicity_certificate: int | None = None
        self.element = FieldElem.leaf(self)

    def series(self, prec: int) -> TruncSeries:
        cached = self._series
        if cached is not None and cached.precision >= prec:
            return cached.truncate(prec)
        if prec > prec_max():
            raise PrecisionExhausted(f"root requested beyond the cap {prec_max()}")
        with self._lock:
            cached = self._series
            if cached is not None and cached.precision >= prec:
                return cached.truncate(prec)
            work = max(prec, 1)
            start = cached
            beta = newton_iterates(self.poly, work, start)[-1]
            self._series = beta
            return beta.truncate(prec)

    def residual(self, prec: int) -> TruncSeries:
        """p(beta) modulo t^prec."""
        coeffs = self.poly.coefficient_series(prec)
        return _horner(coeffs, self.series(prec))

    def derivative_value(self, prec: int) -> TruncSeries:
        """p'(beta) modulo t^prec."""
        coeffs = self.poly.coefficient_series(prec)
        return _horner_derivative(coeffs, self.series(prec))

    def derive(self, D: Derivation) -> FieldElem:
        return root_derivative(D, self)

    def serialize(self) -> str:
        return f"root[{self.poly.serialize()}; near -1]"

    def __repr__(self) -> str:
        return f"HenselRoot({self.serialize()})"


def in_hensel_domain(poly: GtPoly) -> bool:
    return all(a.in_ball(0, 1) for a in poly.alpha)


def hensel_root(poly: GtPoly, prec: int = DEFAULT_ROOT_PREC) -> HenselRoot:
    """Lift the root near -1 to precision ``prec`` and certify simplicity."""
    for i, a in enumerate(poly.alpha):
        if not a.in_ball(0, 1):
            raise OutsideHenselDomain(f"coefficient alpha_{i} has valuation <= 0")
    root = HenselRoot(poly)
    root.series(prec)
    if not root.residual(prec).is_zero():
        raise PrecisionExhausted("residual did not vanish at the requested precision")
    slope = root.derivative_value(1)
    if slope.is_zero():
        raise OutsideHenselDomain("root is not simple")
    root.simplicity_certificate = slope.offset
    return root


def root_derivative(D: Derivation, root: HenselRoot) -> FieldElem:
    """D(beta) = -(D alpha_d beta^d + ... + D alpha_0) / p'(beta), as an analytic element."""
    if root.simplicity_certificate is None and root.derivative_value(1).is_zero():
        raise OutsideHenselDomain("root derivative needs a simple root")
    dal = root.poly.derived(D)
    if all(x.is_symbolic and x.ratfunc.is_zero() for x in dal):
        return FieldElem.coerce(0)
    beta = root.element
    num = FieldElem.coerce(0)
    for c in reversed(dal):
        num = num * beta + c
    return -(num / root.poly.derivative_at(beta))


def derivation_root_identity(D: Derivation, root: HenselRoot, prec: int) -> TruncSeries:
    """(D p)(beta) + p'(beta) D(beta) modulo t^prec (zero for a genuine root)."""
    beta = root.element
    dp = FieldElem.coerce(0)
    for c in reversed(root.poly.derived(D)):
        dp = dp * beta + c
    expr = dp + root.poly.derivative_at(beta) * root_derivative(D, root)
    return series_mod(expr, prec)


def gt_threshold(d: int, U: Ball, V: Ball, ds: Sequence[Derivation] = ()) -> int:
    """s such that v(alpha_i), v(D alpha_i) >= s put the root in U and D(root) in V.

    v(beta + 1) >= min v(alpha_i) by the ultrametric Newton bound, and
    p'(beta) is a unit, so v(D beta) >= min v(D alpha_i).
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    return max(1, U.radius, V.radius)


def threshold_open(s: int, ds: Sequence[Derivation]) -> BasicOpen:
    return BasicOpen.around(0, s, ds)


def check_root(root: HenselRoot, U: Ball, V: Ball, ds: Sequence[Derivation], prec: int) -> dict:
    """Per-root verdict data; ``ok`` is the conjunction of the four literal checks."""
    residual = root.residual(prec).is_zero()
    simple = root.derivative_value(1).offset == 0 and not root.derivative_value(1).is_zero()
    in_u = U.contains(root.element)
    in_v = {D.id: V.contains(root_derivative(D, root)) for D in ds}
    return {
        "residual": residual,
        "simple": simple,
        "in_U": in_u,
        "derivatives_in_V": in_v,
        "ok": residual and simple and in_u and all(in_v.values()),
    }


def _generators_for(ds: Sequence[Derivation], n_gens: int) -> List[int]:
    gens = set(range(1, n_gens + 1))
    for D in ds:
        gens.update(v for v in D.support if v != 0)
    return sorted(gens)


def verify_gt_henselian(
    top: TopologyDesc,
    d_max: int,
    samples: int,
    seed: int,
    *,
    prec: int = DEFAULT_ROOT_PREC,
    radii: Sequence[int] = (0, 1, 2, 3, 4),
    finite_part: int | None = None,
    n_gens: int = 3,
    inject_outside_domain: bool = False,
) -> Report:
    """Sample coefficient tuples at the synthesized threshold and check every lifted root."""
    ds = top.finite_part(finite_part) if not top.is_finite else top.finite_part()
    gens = _generators_for(ds, n_gens)
    report = Report(f"gt-henselian {top.name()}", seed=seed)
    rng = random.Random(seed)
    for d in range(d_max + 1):
        failures = []
        worst = None
        checked = 0
        for k in range(samples):
            ru, rv = rng.choice(radii), rng.choice(radii)
            U, V = Ball(-1, ru), Ball(0, rv)
            s = gt_threshold(d, U, V, ds)
            O = threshold_open(s, ds)
            alpha = tuple(sample_in_open(rng, O, gens) for _ in range(d + 1))
            root = hensel_root(GtPoly(d, alpha), prec)
            res = check_root(root, U, V, ds, prec)
            checked += 1
            if not res["ok"] and not failures:
                worst = {
                    "alpha": [a.serialize() for a in alpha],
                    "U": U.describe(),
                    "V": V.describe(),
                    "threshold": s,
                    "checks": res,
                }
            if not res["ok"]:
                failures.append(k)
        witness = {"d": d, "samples": checked, "precision": prec, "failures": len(failures)}
        if worst is not None:
            witness["counterexample"] = worst
        report.add(f"gt-henselian/d={d}", not failures, **witness)
    if inject_outside_domain:
        poly = GtPoly(0, (FieldElem.coerce(1),))
        try:
            hensel_root(poly, prec)
            report.add("hensel-domain-gate", False, alpha=["1"], note="accepted a unit coefficient")
        except OutsideHenselDomain:
            report.add("hensel-domain-gate", OUTSIDE, alpha=["1"])
    return report
