"""Truncated Laurent series over Q and the generator registry.

Every field element is evaluated inside Q((t)) by sending T to t and the
generator E_i to the power series registered at index i (by default
exp(t^i)).  Valuations are found by evaluating at increasing precision until
a nonzero coefficient shows up or the precision cap is hit; the cap never
turns into a silent "+infinity".
"""

from __future__ import annotations

import contextlib
import contextvars
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Sequence, Tuple

from .core_arith import MPoly, Mono, RatFunc, T_VAR
from .errors import InvalidElement, PrecisionExhausted, UnregisteredGenerator

INF = float("inf")

DEFAULT_PREC_MAX = 4096
START_PREC = 16

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# precision cap

_prec_override: contextvars.ContextVar[int | None] = contextvars.ContextVar(
    "henselab_prec_max", default=None
)


def prec_max() -> int:
    override = _prec_override.get()
    if override is not None:
        return override
    raw = os.environ.get("HENSELAB_PREC_MAX")
    if raw:
        return int(raw)
    return DEFAULT_PREC_MAX


@contextlib.contextmanager
def precision_cap(cap: int):
    token = _prec_override.set(int(cap))
    try:
        yield
    finally:
        _prec_override.reset(token)


# ---------------------------------------------------------------------------
# truncated series


class _NeedPrecision(Exception):
    """Internal: an intermediate division met a denominator that is zero so far."""


@dataclass(frozen=True)
class TruncSeries:
    """Laurent series known modulo t^precision.

    ``coeffs[k]`` is the coefficient of t^(offset + k) and the coefficients run
    all the way up to the precision, so ``offset + len(coeffs) == precision``.
    The first stored coefficient is nonzero unless the series is zero to
    precision, in which case ``coeffs`` is empty and ``offset == precision``.
    """

    offset: int
    coeffs: Tuple[Fraction, ...]
    precision: int

    @classmethod
    def make(cls, offset: int, coeffs: Sequence, precision: int) -> "TruncSeries":
        coeffs = list(coeffs[: max(0, precision - offset)])
        coeffs.extend([_ZERO] * (precision - offset - len(coeffs)))
        k = 0
        while k < len(coeffs) and not coeffs[k]:
            k += 1
        if k == len(coeffs):
            return cls(precision, (), precision)
        return cls(offset + k, tuple(Fraction(c) for c in coeffs[k:]), precision)

    @classmethod
    def exact(cls, coeffs_by_exp: Dict[int, Fraction], precision: int) -> "TruncSeries":
        if not coeffs_by_exp:
            return cls(precision, (), precision)
        lo = min(coeffs_by_exp)
        out = [_ZERO] * max(0, precision - lo)
        for e, c in coeffs_by_exp.items():
            if e < precision:
                out[e - lo] = Fraction(c)
        return cls.make(lo, out, precision)

    @classmethod
    def zero(cls, precision: int) -> "TruncSeries":
        return cls(precision, (), precision)

    def is_zero(self) -> bool:
        """Zero modulo t^precision (says nothing beyond the precision)."""
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Exact valuation if nonzero; otherwise the precision (a lower bound)."""
        return self.offset

    def coefficient(self, e: int) -> Fraction:
        if e >= self.precision:
            raise PrecisionExhausted(f"coefficient of t^{e} beyond precision {self.precision}")
        k = e - self.offset
        if k < 0 or k >= len(self.coeffs):
            return _ZERO
        return self.coeffs[k]

    def truncate(self, precision: int) -> "TruncSeries":
        if precision >= self.precision:
            return self
        if precision <= self.offset:
            return TruncSeries.zero(precision)
        return TruncSeries.make(self.offset, self.coeffs[: precision - self.offset], precision)

    def shift(self, k: int) -> "TruncSeries":
        return TruncSeries(self.offset + k, self.coeffs, self.precision + k)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.offset, tuple(-c for c in self.coeffs), self.precision)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        prec = min(self.precision, other.precision)
        if not other.coeffs:
            return self.truncate(prec)
        if not self.coeffs:
            return other.truncate(prec)
        lo = min(self.offset, other.offset)
        out = [_ZERO] * (prec - lo)
        for src in (self, other):
            base = src.offset - lo
            for k, c in enumerate(src.coeffs[: prec - src.offset]):
                out[base + k] += c
        return TruncSeries.make(lo, out, prec)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def scale(self, c) -> "TruncSeries":
        c = Fraction(c)
        if not c:
            return TruncSeries.zero(self.precision)
        return TruncSeries(self.offset, tuple(x * c for x in self.coeffs), self.precision)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        va, vb = self.offset, other.offset
        prec = min(self.precision + vb, other.precision + va)
        lo = va + vb
        n = prec - lo
        if n <= 0 or not self.coeffs or not other.coeffs:
            return TruncSeries.zero(prec)
        a, b = self.coeffs, other.coeffs
        out = [_ZERO] * n
        la, lb = min(len(a), n), min(len(b), n)
        for i in range(la):
            ai = a[i]
            if not ai:
                continue
            top = min(lb, n - i)
            for j in range(top):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return TruncSeries.make(lo, out, prec)

    __rmul__ = __mul__

    def inverse(self) -> "TruncSeries":
        """1/self; the leading coefficient must be known (series nonzero to precision)."""
        if not self.coeffs:
            raise _NeedPrecision()
        v = self.offset
        u = self.coeffs
        n = len(u)
        inv0 = 1 / u[0]
        out = [inv0]
        for k in range(1, n):
            s = _ZERO
            for j in range(1, k + 1):
                uj = u[j]
                if uj:
                    s += uj * out[k - j]
            out.append(-s * inv0)
        # unit part known to relative precision n
        return TruncSeries.make(-v, out, -v + n)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        return self * other.inverse()

    def pow(self, k: int) -> "TruncSeries":
        if k < 0:
            return self.inverse().pow(-k)
        if k == 0:
            return TruncSeries.exact({0: _ONE}, max(self.precision - self.offset, 1))
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def to_dict(self) -> Dict[int, Fraction]:
        return {self.offset + k: c for k, c in enumerate(self.coeffs) if c}

    def __str__(self) -> str:
        terms = []
        for e, c in sorted(self.to_dict().items()):
            terms.append(f"{c}*t^{e}" if e else str(c))
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(t^{self.precision})"


def exp_poly_series(g: Dict[int, int], prec: int) -> List[Fraction]:
    """Coefficients of exp(sum g[k] t^k) below t^prec (g supported on k >= 1)."""
    f = [_ZERO] * prec
    if prec <= 0:
        return f
    f[0] = _ONE
    items = [(k, Fraction(k * c)) for k, c in g.items() if c and k < prec]
    for n in range(1, prec):
        s = _ZERO
        for k, kc in items:
            if k <= n:
                fn = f[n - k]
                if fn:
                    s += kc * fn
        f[n] = s / n
    return f


def exp_monomial_coeffs(i: int, prec: int) -> List[Fraction]:
    """Coefficients of exp(t^i) below t^prec."""
    out = [_ZERO] * prec
    k = 0
    while i * k < prec:
        out[i * k] = Fraction(1, factorial(k))
        k += 1
    return out


# ---------------------------------------------------------------------------
# generator registry


CoeffProcedure = Callable[[int], Sequence[Fraction]]


class GeneratorRegistry:
    """Append-only table of power series assigned to E1, E2, ...

    Entry i (1-based) maps a precision N to the first N coefficients of the
    series standing for E_i.  Unless overridden, entry i is exp(t^i); the
    family exp(t), exp(t^2), ... is algebraically independent over Q(t), so
    symbolic zero tests in Q(T, E1, ...) are faithful to the series values.
    """

    def __init__(self, size: int = 0):
        self._lock = threading.Lock()
        self._entries: List[CoeffProcedure | None] = []
        self._poly_cache: Dict[Tuple[MPoly, int], TruncSeries] = {}
        self._mono_cache: Dict[Tuple[Mono, int], List[Fraction]] = {}
        self.ensure(size)

    def __len__(self) -> int:
        return len(self._entries)

    def ensure(self, size: int) -> None:
        with self._lock:
            while len(self._entries) < size:
                self._entries.append(None)

    def register(self, procedure: CoeffProcedure | None = None) -> int:
        """Append an entry (default exp(t^i)) and return its index."""
        with self._lock:
            self._entries.append(procedure)
            return len(self._entries)

    def mint(self) -> int:
        return self.register(None)

    def is_registered(self, i: int) -> bool:
        return 1 <= i <= len(self._entries)

    def is_default(self, i: int) -> bool:
        self._check(i)
        return self._entries[i - 1] is None

    def _check(self, i: int) -> None:
        if not self.is_registered(i):
            raise UnregisteredGenerator(f"generator e{i} is not registered (registry size {len(self)})")

    def generator_coeffs(self, i: int, prec: int) -> List[Fraction]:
        self._check(i)
        proc = self._entries[i - 1]
        if proc is None:
            return exp_monomial_coeffs(i, prec)
        coeffs = [Fraction(c) for c in proc(prec)][:prec]
        coeffs.extend([_ZERO] * (prec - len(coeffs)))
        return coeffs

    def check_poly(self, p: MPoly) -> None:
        for v in p.vars():
            if v != T_VAR:
                self._check(v)

    # -- evaluation -------------------------------------------------------

    def _mono_power_series(self, m: Mono, prec: int) -> List[Fraction]:
        """Coefficients below t^prec of prod E_i^k over the non-T part of m."""
        key = (m, prec)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        if all(self.is_default(v) for v, _ in m):
            coeffs = exp_poly_series({v: e for v, e in m}, prec)
        else:
            s = TruncSeries.exact({0: _ONE}, prec)
            for v, e in m:
                g = TruncSeries.make(0, self.generator_coeffs(v, prec), prec)
                s = s * g.pow(e)
            coeffs = [s.coefficient(k) for k in range(prec)]
        if len(self._mono_cache) > 200_000:
            self._mono_cache.clear()
        self._mono_cache[key] = coeffs
        return coeffs

    def poly_series(self, p: MPoly, prec: int) -> TruncSeries:
        """Power series of the polynomial p modulo t^prec."""
        key = (p, prec)
        hit = self._poly_cache.get(key)
        if hit is not None:
            return hit
        self.check_poly(p)
        out = [_ZERO] * max(prec, 0)
        for m, c in p.terms.items():
            tpow = 0
            rest = m
            if m and m[0][0] == T_VAR:
                tpow = m[0][1]
                rest = m[1:]
            n = prec - tpow
            if n <= 0:
                continue
            if not rest:
                out[tpow] += c
                continue
            coeffs = self._mono_power_series(rest, n)
            for k in range(n):
                ck = coeffs[k]
                if ck:
                    out[tpow + k] += c * ck
        s = TruncSeries.make(0, out, prec)
        if len(self._poly_cache) > 100_000:
            self._poly_cache.clear()
        self._poly_cache[key] = s
        return s

    def poly_valuation(self, p: MPoly) -> int | float:
        if p.is_zero():
            return INF
        prec = START_PREC
        cap = prec_max()
        while True:
            s = self.poly_series(p, min(prec, cap))
            if not s.is_zero():
                return s.offset
            if prec >= cap:
                raise PrecisionExhausted(
                    f"nonzero polynomial vanishes to t^{cap}; raise HENSELAB_PREC_MAX"
                )
            prec *= 2

    def ratfunc_series(self, r: RatFunc, prec: int) -> TruncSeries:
        """Series of r modulo t^prec, adaptively raising the working precision."""
        if r.den.is_one():
            return self.poly_series(r.num, max(prec, 0)) if prec > 0 else TruncSeries.zero(prec)
        vd = self.poly_valuation(r.den)
        if vd == 0 and r.den.is_constant():
            return self.poly_series(r.num, prec).scale(1 / r.den.constant_value())
        # num/den known mod t^(prec) needs num mod t^(prec+vd), den mod t^(prec+2vd-vnum)
        w = max(prec + vd, 1)
        num = self.poly_series(r.num, w)
        vn = num.offset
        wd = max(prec + 2 * vd - min(vn, prec + vd), vd + 1)
        den = self.poly_series(r.den, wd)
        return (num / den).truncate(prec)


_default_registry = GeneratorRegistry(8)
_current: contextvars.ContextVar[GeneratorRegistry] = contextvars.ContextVar(
    "henselab_registry", default=_default_registry
)


def current_registry() -> GeneratorRegistry:
    return _current.get()


@contextlib.contextmanager
def registry_scope(registry: GeneratorRegistry | None = None, size: int = 8):
    """Evaluate against a private registry (fresh, with ``size`` default entries)."""
    reg = registry if registry is not None else GeneratorRegistry(size)
    token = _current.set(reg)
    try:
        yield reg
    finally:
        _current.reset(token)


# ---------------------------------------------------------------------------
# public evaluation entry points


def eval_series(a, prec: int) -> TruncSeries:
    """Laurent expansion of a field element modulo t^prec.

    ``a`` may be a RatFunc, an MPoly, a rational, or any object exposing
    ``_series_approx(w)`` (the analytic tier).
    """
    if prec < 1:
        raise ValueError("precision must be at least 1")
    return series_mod(a, prec)


def series_mod(a, prec: int) -> TruncSeries:
    """Like eval_series but accepts any integer precision (negative allowed)."""
    reg = current_registry()
    if isinstance(a, (int, Fraction)):
        return TruncSeries.exact({0: Fraction(a)} if a else {}, prec)
    if isinstance(a, MPoly):
        if prec <= 0:
            return TruncSeries.zero(prec)
        return reg.poly_series(a, prec)
    if isinstance(a, RatFunc):
        return reg.ratfunc_series(a, prec)
    symbolic = getattr(a, "ratfunc", None)
    if symbolic is not None:
        return reg.ratfunc_series(symbolic, prec)
    approx = getattr(a, "_series_approx", None)
    if approx is None:
        raise TypeError(f"cannot evaluate {type(a).__name__} as a series")
    cap = prec_max()
    w = max(prec, 1)
    while True:
        try:
            s = approx(w)
        except _NeedPrecision:
            s = None
        if s is not None and s.precision >= prec:
            return s.truncate(prec)
        if w >= cap:
            raise PrecisionExhausted(f"could not reach precision {prec} below the cap {cap}")
        w = min(cap, max(2 * w, w + (prec - (s.precision if s is not None else 0))))


def valuation(a) -> int | float:
    """t-adic valuation; +inf exactly for zero.

    Raises PrecisionExhausted when a nonzero analytic element cannot be
    separated from zero below the cap.
    """
    reg = current_registry()
    if isinstance(a, (int, Fraction)):
        return 0 if a else INF
    if isinstance(a, MPoly):
        return reg.poly_valuation(a)
    if isinstance(a, RatFunc):
        if a.is_zero():
            return INF
        return reg.poly_valuation(a.num) - reg.poly_valuation(a.den)
    symbolic = getattr(a, "ratfunc", None)
    if symbolic is not None:
        return valuation(symbolic)
    cap = prec_max()
    prec = START_PREC
    while True:
        s = series_mod(a, prec)
        if not s.is_zero():
            return s.offset
        if prec >= cap:
            raise PrecisionExhausted(f"element vanishes to t^{cap}; cannot certify its valuation")
        prec = min(cap, prec * 2)


def laurent_to_ratfunc(s: TruncSeries) -> RatFunc:
    """The Laurent polynomial sum c_k t^k of the known coefficients, as an element of Q(t)."""
    terms = s.to_dict()
    if not terms:
        return RatFunc.const(0)
    lo = min(terms)
    shift = -lo if lo < 0 else 0
    num = MPoly.from_terms(((((T_VAR, e + shift),) if e + shift else (), c) for e, c in terms.items()))
    if shift:
        return RatFunc(num, MPoly.var(T_VAR, shift))
    return RatFunc.from_poly(num)
