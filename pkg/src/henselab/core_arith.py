"""Exact arithmetic over Q(T, E1, E2, ...).

Rationals are ``fractions.Fraction``.  A polynomial is a sparse map from
monomials to nonzero rational coefficients, where a monomial is a tuple of
``(var, exp)`` pairs sorted by variable index.  Variable 0 is T and variable
``i >= 1`` is E_i, so the arity is open-ended: minting a new generator never
forces existing polynomials to be rewritten.

  3/2*E1*T^2 + 5   ->   {((0, 2), (1, 1)): Fraction(3, 2), (): Fraction(5)}

Monomials are ordered graded-lexicographically with T < E1 < E2 < ...; the
leading coefficient of every stored denominator is 1 under that order, so
two reduced rational functions are equal iff their representations are.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd as igcd
from typing import Dict, Iterable, Iterator, Tuple

from .errors import InvalidElement

Rat = Fraction
Mono = Tuple[Tuple[int, int], ...]

T_VAR = 0

_ONE_MONO: Mono = ()
_MOD_PRIME = (1 << 61) - 1


def var_name(var: int) -> str:
    return "t" if var == T_VAR else f"e{var}"


# ---------------------------------------------------------------------------
# monomials


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Mono, b: Mono) -> Mono | None:
    """a / b if b divides a, else None."""
    if not b:
        return a
    da = dict(a)
    for v, e in b:
        have = da.get(v, 0)
        if have < e:
            return None
        if have == e:
            del da[v]
        else:
            da[v] = have - e
    return tuple(sorted(da.items()))


def mono_gcd(a: Mono, b: Mono) -> Mono:
    db = dict(b)
    return tuple((v, min(e, db[v])) for v, e in a if v in db)


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def grlex_key(m: Mono):
    return (mono_degree(m), tuple(reversed(m)))


def mono_str(m: Mono) -> str:
    parts = []
    for v, e in reversed(m):
        parts.append(var_name(v) if e == 1 else f"{var_name(v)}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# polynomials


class MPoly:
    """Sparse multivariate polynomial with rational coefficients (immutable)."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Dict[Mono, Fraction] | None = None):
        # trusted constructor: callers guarantee no zero coefficients
        self.terms: Dict[Mono, Fraction] = terms if terms is not None else {}
        self._hash = None

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[Mono, object]]) -> "MPoly":
        out: Dict[Mono, Fraction] = {}
        for m, c in items:
            c = Fraction(c)
            if c:
                m = tuple(sorted((v, e) for v, e in m if e))
                s = out.get(m, 0) + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return cls(out)

    @classmethod
    def const(cls, c) -> "MPoly":
        c = Fraction(c)
        return cls({_ONE_MONO: c} if c else {})

    @classmethod
    def var(cls, v: int, exp: int = 1) -> "MPoly":
        if exp == 0:
            return cls.const(1)
        return cls({((v, exp),): Fraction(1)})

    @classmethod
    def monomial(cls, m: Mono, c=1) -> "MPoly":
        c = Fraction(c)
        return cls({m: c} if c else {})

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(_ONE_MONO) == 1

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> Fraction:
        return self.terms.get(_ONE_MONO, Fraction(0))

    def vars(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def degree(self, var: int) -> int:
        best = 0
        for m in self.terms:
            for v, e in m:
                if v == var and e > best:
                    best = e
        return best

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def leading(self) -> Tuple[Mono, Fraction]:
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def sorted_terms(self) -> list[Tuple[Mono, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: grlex_key(mc[0]), reverse=True)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "MPoly") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return MPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        return MPoly.const(other) - self

    def scale(self, c) -> "MPoly":
        c = Fraction(c)
        if not c:
            return MPoly()
        if c == 1:
            return self
        return MPoly({m: v * c for m, v in self.terms.items()})

    def mul_mono(self, m: Mono, c=1) -> "MPoly":
        c = Fraction(c)
        if not c:
            return MPoly()
        return MPoly({mono_mul(k, m): v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return MPoly()
        a, b = (self, other) if len(self.terms) >= len(other.terms) else (other, self)
        if len(b.terms) == 1:
            (m, c), = b.terms.items()
            return a.mul_mono(m, c)
        out: Dict[Mono, Fraction] = {}
        for mb, cb in b.terms.items():
            for ma, ca in a.terms.items():
                m = mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return MPoly({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MPoly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def exact_div(self, other: "MPoly") -> "MPoly":
        """Quotient self / other; raises ValueError if the division is not exact."""
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        if len(other.terms) == 1:
            (om, oc), = other.terms.items()
            out = {}
            for m, c in self.terms.items():
                q = mono_div(m, om)
                if q is None:
                    raise ValueError("inexact polynomial division")
                out[q] = c / oc
            return MPoly(out)
        lm, lc = other.leading()
        rem = dict(self.terms)
        quot: Dict[Mono, Fraction] = {}
        others = list(other.terms.items())
        while rem:
            m = max(rem, key=grlex_key)
            qm = mono_div(m, lm)
            if qm is None:
                raise ValueError("inexact polynomial division")
            qc = rem[m] / lc
            quot[qm] = qc
            for om, oc in others:
                mm = mono_mul(qm, om)
                v = rem.get(mm, 0) - qc * oc
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return MPoly(quot)

    # -- structure --------------------------------------------------------

    def coeffs_in(self, var: int) -> Dict[int, "MPoly"]:
        """View as a polynomial in ``var``: exponent -> coefficient polynomial."""
        buckets: Dict[int, Dict[Mono, Fraction]] = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (v, ev) in enumerate(m):
                if v == var:
                    e = ev
                    rest = m[:i] + m[i + 1:]
                    break
            buckets.setdefault(e, {})[rest] = c
        return {e: MPoly(d) for e, d in buckets.items()}

    def monomial_content(self) -> Mono:
        it = iter(self.terms)
        g = next(it)
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    def rational_content(self) -> Fraction:
        num = 0
        den = 1
        for c in self.terms.values():
            num = igcd(num, c.numerator)
            den = den * c.denominator // igcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MPoly":
        """Integer polynomial with coprime coefficients and positive leading coefficient."""
        if not self.terms:
            return self
        c = self.rational_content()
        if self.leading()[1] < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> "MPoly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading()[1])

    def partial(self, var: int) -> "MPoly":
        out: Dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            for i, (v, e) in enumerate(m):
                if v == var:
                    nm = m[:i] + ((v, e - 1),) + m[i + 1:] if e > 1 else m[:i] + m[i + 1:]
                    out[nm] = c * e
                    break
        return MPoly(out)

    def substitute_mod(self, point: Dict[int, int], keep: int, p: int) -> Dict[int, int] | None:
        """Specialize every variable except ``keep`` to ``point`` mod p.

        Returns exponent -> residue, or None if a coefficient denominator
        vanishes mod p.
        """
        out: Dict[int, int] = {}
        for m, c in self.terms.items():
            den = c.denominator % p
            if not den:
                return None
            val = c.numerator * pow(den, -1, p) % p
            e_keep = 0
            for v, e in m:
                if v == keep:
                    e_keep = e
                else:
                    val = val * pow(point[v], e, p) % p
            out[e_keep] = (out.get(e_keep, 0) + val) % p
        return out

    def __iter__(self) -> Iterator[Tuple[Mono, Fraction]]:
        return iter(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            if not m:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono_str(m)
            else:
                body = f"{abs(c)}*{mono_str(m)}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)

    def __repr__(self) -> str:
        return f"MPoly({self})"


ZERO_POLY = MPoly()
ONE_POLY = MPoly.const(1)


# ---------------------------------------------------------------------------
# gcd: content + recursive primitive remainder sequences, with a modular
# certificate for the (common) coprime case.


def _uni_gcd_degree_mod(a: Dict[int, int], b: Dict[int, int], p: int) -> int:
    fa = _uni_trim([a.get(i, 0) for i in range(max(a) + 1)])
    fb = _uni_trim([b.get(i, 0) for i in range(max(b) + 1)])
    while fb:
        fa, fb = fb, _uni_rem(fa, fb, p)
    return len(fa) - 1


def _uni_trim(f: list[int]) -> list[int]:
    while f and not f[-1]:
        f.pop()
    return f


def _uni_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        q = a[-1] * inv % p
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - q * c) % p
        _uni_trim(a)
    return a


def _coprime_certificate(a: MPoly, b: MPoly, common: set[int]) -> bool:
    """True only if gcd(a, b) is certainly constant.

    For each shared variable x, specialize the others mod p at a point where
    both leading coefficients in x survive; the specialized gcd then has degree
    at least deg_x of the true gcd, so degree zero everywhere proves coprimality.
    """
    rng = random.Random(0x5EED)
    variables = sorted(a.vars() | b.vars())
    for x in sorted(common):
        for _attempt in range(3):
            point = {v: rng.randrange(2, _MOD_PRIME) for v in variables if v != x}
            ua = a.substitute_mod(point, x, _MOD_PRIME)
            ub = b.substitute_mod(point, x, _MOD_PRIME)
            if ua is None or ub is None:
                continue
            if not ua.get(a.degree(x)) or not ub.get(b.degree(x)):
                continue
            if _uni_gcd_degree_mod(ua, ub, _MOD_PRIME) > 0:
                return False
            break
        else:
            return False
    return True


def _content_in(a: MPoly, var: int) -> MPoly:
    coeffs = sorted(a.coeffs_in(var).values(), key=lambda c: len(c.terms))
    g = coeffs[0]
    if g.is_constant():
        return ONE_POLY
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            return ONE_POLY
    return g


def _strip_var_power(a: MPoly, var: int) -> MPoly:
    k = min((dict(m).get(var, 0) for m in a.terms), default=0)
    if not k:
        return a
    return a.exact_div(MPoly.var(var, k))


def _prem(a: MPoly, b: MPoly, var: int) -> MPoly:
    db = b.degree(var)
    lb = b.coeffs_in(var)[db]
    while a.terms:
        da = a.degree(var)
        if da < db:
            break
        la = a.coeffs_in(var)[da]
        a = (a * lb) - (b * la).mul_mono(((var, da - db),) if da > db else ())
        if a.terms:
            a = a.primitive()
    return a


def _prs_gcd(a: MPoly, b: MPoly, var: int) -> MPoly:
    # a, b primitive in var with no var-power factor
    if a.degree(var) < b.degree(var):
        a, b = b, a
    while True:
        r = _prem(a, b, var)
        if not r.terms:
            return b
        if r.degree(var) == 0:
            return ONE_POLY
        r = _strip_var_power(r, var)
        r = r.exact_div(_content_in(r, var)).primitive()
        a, b = b, r


def _gcd_no_mono(a: MPoly, b: MPoly) -> MPoly:
    while True:
        if a.is_constant() or b.is_constant():
            return ONE_POLY
        va, vb = a.vars(), b.vars()
        only_a = va - vb
        if only_a:
            a = _content_in(a, max(only_a))
            continue
        only_b = vb - va
        if only_b:
            b = _content_in(b, max(only_b))
            continue
        break
    common = va
    if _coprime_certificate(a, b, common):
        return ONE_POLY
    x = max(common, key=lambda v: (-min(a.degree(v), b.degree(v)), v))
    ca, cb = _content_in(a, x), _content_in(b, x)
    pa = a.exact_div(ca).primitive()
    pb = b.exact_div(cb).primitive()
    c = poly_gcd(ca, cb)
    g = _prs_gcd(pa, pb, x)
    return c * g


def poly_gcd(a: MPoly, b: MPoly) -> MPoly:
    """Greatest common divisor, normalized to leading coefficient 1."""
    if not a.terms:
        return b.monic()
    if not b.terms:
        return a.monic()
    if a.is_constant() or b.is_constant():
        return ONE_POLY
    ma, mb = a.monomial_content(), b.monomial_content()
    m = mono_gcd(ma, mb)
    if len(a.terms) == 1 or len(b.terms) == 1:
        return MPoly.monomial(m)
    a1 = a.exact_div(MPoly.monomial(ma)) if ma else a
    b1 = b.exact_div(MPoly.monomial(mb)) if mb else b
    g = _gcd_no_mono(a1, b1)
    if m:
        g = g.mul_mono(m)
    return g.monic()


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced quotient num/den with den monic under grlex (immutable)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MPoly, den: MPoly = ONE_POLY, *, reduced: bool = False):
        if not den.terms:
            raise InvalidElement("rational function with zero denominator")
        if not reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(MPoly.const(c), ONE_POLY, reduced=True)

    @classmethod
    def var(cls, v: int) -> "RatFunc":
        return cls(MPoly.var(v), ONE_POLY, reduced=True)

    @classmethod
    def from_poly(cls, p: MPoly) -> "RatFunc":
        return cls(p, ONE_POLY, reduced=True)

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def vars(self) -> set[int]:
        return self.num.vars() | self.den.vars()

    def __add__(self, other) -> "RatFunc":
        other = _as_ratfunc(other)
        a, b, c, d = self.num, self.den, other.num, other.den
        if not a.terms:
            return other
        if not c.terms:
            return self
        if b == d:
            return RatFunc(a + c, b)
        if b.is_one():
            return RatFunc(a * d + c, d, reduced=True)
        if d.is_one():
            return RatFunc(a + c * b, b, reduced=True)
        g = poly_gcd(b, d)
        if g.is_one():
            # product of monic denominators is monic
            return RatFunc(a * d + c * b, b * d, reduced=True)
        b1, d1 = b.exact_div(g), d.exact_div(g)
        num = a * d1 + c * b1
        g2 = poly_gcd(num, g)
        num = num.exact_div(g2)
        den = b1 * d1 * g.exact_div(g2)
        return _normalized(num, den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other) -> "RatFunc":
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other) -> "RatFunc":
        return _as_ratfunc(other) + (-self)

    def __mul__(self, other) -> "RatFunc":
        other = _as_ratfunc(other)
        a, b, c, d = self.num, self.den, other.num, other.den
        if not a.terms or not c.terms:
            return RatFunc(ZERO_POLY, ONE_POLY, reduced=True)
        g1 = poly_gcd(a, d) if not d.is_one() else ONE_POLY
        g2 = poly_gcd(c, b) if not b.is_one() else ONE_POLY
        if not g1.is_one():
            a, d = a.exact_div(g1), d.exact_div(g1)
        if not g2.is_one():
            c, b = c.exact_div(g2), b.exact_div(g2)
        return _normalized(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.terms:
            raise InvalidElement("division by zero")
        return _normalized(self.den, self.num)

    def __truediv__(self, other) -> "RatFunc":
        return self * _as_ratfunc(other).inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return _as_ratfunc(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, reduced=True)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MPoly)):
            other = _as_ratfunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def partial(self, var: int) -> "RatFunc":
        return formal_partial(self, var)

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def _as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, MPoly):
        return RatFunc.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc.const(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


def _normalized(num: MPoly, den: MPoly) -> RatFunc:
    # num/den already coprime; only the denominator scaling is left
    if not num.terms:
        return RatFunc(ZERO_POLY, ONE_POLY, reduced=True)
    lc = den.leading()[1]
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return RatFunc(num, den, reduced=True)


def _reduce(num: MPoly, den: MPoly) -> Tuple[MPoly, MPoly]:
    if not num.terms:
        return ZERO_POLY, ONE_POLY
    if not den.is_constant():
        g = poly_gcd(num, den)
        if not g.is_one():
            num, den = num.exact_div(g), den.exact_div(g)
    lc = den.leading()[1]
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


def arith(op: str, a: RatFunc, b: RatFunc) -> RatFunc:
    """Field operation ``op`` in {add, sub, mul, div} on reduced operands."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise InvalidElement("division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def is_zero_symbolic(a: RatFunc) -> bool:
    return a.num.is_zero()


def formal_partial(r: RatFunc, var: int) -> RatFunc:
    """Quotient-rule partial derivative of r with respect to ``var``."""
    dn = r.num.partial(var)
    dd = r.den.partial(var)
    if not dd.terms:
        if not dn.terms:
            return RatFunc(ZERO_POLY, ONE_POLY, reduced=True)
        if r.den.is_one():
            return RatFunc(dn, ONE_POLY, reduced=True)
        return RatFunc(dn, r.den)
    return RatFunc(dn * r.den - r.num * dd, r.den * r.den)


def t_ratfunc() -> RatFunc:
    return RatFunc.var(T_VAR)


def gen_ratfunc(i: int) -> RatFunc:
    if i < 1:
        raise ValueError("generator indices start at 1")
    return RatFunc.var(i)
