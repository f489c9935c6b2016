"""The working field K = Q(t, e1, e2, ...) and its derivations.

Elements come in two tiers.  Symbolic elements are reduced rational functions
in t and the registered generators; equality on them is exact.  Analytic
elements additionally mention Hensel roots, which live in the relative
algebraic closure of the symbolic field inside Q((t)); they are expression
trees evaluated lazily as truncated series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .core_arith import MPoly, RatFunc, T_VAR, formal_partial, var_name
from .errors import (
    InvalidElement,
    NoWitnessFound,
    PrecisionExhausted,
    UnregisteredGenerator,
    UnsupportedTier,
)
from .series import (
    INF,
    TruncSeries,
    _NeedPrecision,
    current_registry,
    laurent_to_ratfunc,
    series_mod,
    valuation,
)

SYMBOLIC = "symbolic"
ANALYTIC = "analytic"


class FieldElem:
    """An element of K.

    Exactly one of ``ratfunc`` (symbolic tier) or ``node`` (analytic tier) is
    set.  Nodes are tuples ``(op, *children)`` with op in add/mul/neg/inv, or
    ``("leaf", obj)`` where obj provides ``series(prec)``, ``derive(D)`` and
    ``serialize()``.
    """

    __slots__ = ("ratfunc", "node", "_memo")

    def __init__(self, ratfunc: RatFunc | None = None, node: tuple | None = None):
        self.ratfunc = ratfunc
        self.node = node
        self._memo: Dict[int, TruncSeries] | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def coerce(cls, x) -> "FieldElem":
        if isinstance(x, FieldElem):
            return x
        if isinstance(x, RatFunc):
            return cls(x)
        if isinstance(x, MPoly):
            return cls(RatFunc.from_poly(x))
        if isinstance(x, (int, Fraction)):
            return cls(RatFunc.const(x))
        raise TypeError(f"cannot interpret {type(x).__name__} as a field element")

    @classmethod
    def leaf(cls, obj) -> "FieldElem":
        return cls(node=("leaf", obj))

    # -- tier -------------------------------------------------------------

    @property
    def tier(self) -> str:
        return SYMBOLIC if self.ratfunc is not None else ANALYTIC

    @property
    def is_symbolic(self) -> bool:
        return self.ratfunc is not None

    def generators(self) -> set[int]:
        """Generator indices (t excluded) referenced by a symbolic element."""
        if self.ratfunc is None:
            raise UnsupportedTier("generator set of an analytic element")
        return {v for v in self.ratfunc.vars() if v != T_VAR}

    def is_zero(self) -> bool:
        """Exact zero test; analytic elements go through valuation certification."""
        if self.ratfunc is not None:
            return self.ratfunc.is_zero()
        return valuation(self) == INF

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "FieldElem":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.ratfunc is not None and other.ratfunc is not None:
            return FieldElem(self.ratfunc + other.ratfunc)
        return FieldElem(node=("add", self, other))

    __radd__ = __add__

    def __neg__(self) -> "FieldElem":
        if self.ratfunc is not None:
            return FieldElem(-self.ratfunc)
        return FieldElem(node=("neg", self))

    def __sub__(self, other) -> "FieldElem":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "FieldElem":
        return FieldElem.coerce(other) - self

    def __mul__(self, other) -> "FieldElem":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.ratfunc is not None and other.ratfunc is not None:
            return FieldElem(self.ratfunc * other.ratfunc)
        return FieldElem(node=("mul", self, other))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.ratfunc is not None:
            if self.ratfunc.is_zero():
                raise InvalidElement("division by zero")
            return FieldElem(self.ratfunc.inverse())
        if valuation(self) == INF:
            raise InvalidElement("division by zero")
        return FieldElem(node=("inv", self))

    def __truediv__(self, other) -> "FieldElem":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "FieldElem":
        return FieldElem.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "FieldElem":
        if self.ratfunc is not None:
            if n < 0 and self.ratfunc.is_zero():
                raise InvalidElement("division by zero")
            return FieldElem(self.ratfunc ** n)
        if n < 0:
            return self.inverse() ** (-n)
        result = FieldElem.coerce(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.ratfunc is not None and other.ratfunc is not None:
            return self.ratfunc == other.ratfunc
        # analytic elements compare by identity; use agree_to_precision for values
        return self is other

    def __hash__(self) -> int:
        if self.ratfunc is not None:
            return hash(self.ratfunc)
        return id(self)

    # -- evaluation -------------------------------------------------------

    def _series_approx(self, w: int) -> TruncSeries:
        if self.ratfunc is not None:
            return series_mod(self.ratfunc, w)
        memo = self._memo
        if memo is not None and w in memo:
            return memo[w]
        op = self.node[0]
        if op == "add":
            s = self.node[1]._series_approx(w) + self.node[2]._series_approx(w)
        elif op == "neg":
            s = -self.node[1]._series_approx(w)
        elif op == "mul":
            s = self.node[1]._series_approx(w) * self.node[2]._series_approx(w)
        elif op == "inv":
            inner = self.node[1]._series_approx(w)
            if inner.is_zero():
                raise _NeedPrecision()
            s = inner.inverse()
        elif op == "leaf":
            s = self.node[1].series(w)
        else:
            raise AssertionError(op)
        if memo is None:
            memo = self._memo = {}
        memo[w] = s
        return s

    def series(self, prec: int) -> TruncSeries:
        return series_mod(self, prec)

    def valuation(self):
        return valuation(self)

    def in_ball(self, center, radius: int) -> bool:
        """v(self - center) >= radius, decided exactly from coefficients below t^radius."""
        center = FieldElem.coerce(center)
        if self.ratfunc is not None and center.ratfunc is not None and self.ratfunc == center.ratfunc:
            return True
        if center.ratfunc is not None and center.ratfunc.is_zero():
            return series_mod(self, radius).is_zero()
        return (series_mod(self, radius) - series_mod(center, radius)).is_zero()

    # -- display ----------------------------------------------------------

    def serialize(self) -> str:
        if self.ratfunc is not None:
            return str(self.ratfunc)
        op = self.node[0]
        if op == "add":
            return f"({self.node[1].serialize()} + {self.node[2].serialize()})"
        if op == "mul":
            return f"({self.node[1].serialize()} * {self.node[2].serialize()})"
        if op == "neg":
            return f"(-{self.node[1].serialize()})"
        if op == "inv":
            return f"(1/{self.node[1].serialize()})"
        return self.node[1].serialize()

    __str__ = serialize

    def __repr__(self) -> str:
        return f"FieldElem({self.serialize()})"


def _coerce_or_none(x) -> FieldElem | None:
    try:
        return FieldElem.coerce(x)
    except TypeError:
        return None


def const(c) -> FieldElem:
    return FieldElem.coerce(Fraction(c))


def t_elem() -> FieldElem:
    return FieldElem(RatFunc.var(T_VAR))


def gen(i: int) -> FieldElem:
    """The generator e_i; it must already be registered."""
    reg = current_registry()
    if not reg.is_registered(i):
        raise UnregisteredGenerator(f"generator e{i} is not registered")
    return FieldElem(RatFunc.var(i))


def t_power(k: int) -> FieldElem:
    if k >= 0:
        return FieldElem(RatFunc.from_poly(MPoly.var(T_VAR, k)))
    return FieldElem(RatFunc(MPoly.const(1), MPoly.var(T_VAR, -k), reduced=True))


def agree_to_precision(a, b, prec: int) -> bool:
    """a == b modulo t^prec."""
    return (FieldElem.coerce(a) - FieldElem.coerce(b)).in_ball(0, prec)


def truncation(a, prec: int) -> FieldElem:
    """The Laurent polynomial in t agreeing with a below t^prec (an element of Q(t))."""
    return FieldElem(laurent_to_ratfunc(series_mod(FieldElem.coerce(a), prec)))


# ---------------------------------------------------------------------------
# derivations


_anon_ids = count(1)


@dataclass(frozen=True, eq=False)
class Derivation:
    """A derivation K -> K, fixed by its values on t, e1, e2, ...

    ``values`` lists (variable, value) pairs for the nonzero values only;
    variable 0 is t.  Derivations vanish on Q automatically.
    """

    id: str
    values: Tuple[Tuple[int, FieldElem], ...]

    def value(self, var: int) -> FieldElem:
        for v, val in self.values:
            if v == var:
                return val
        return FieldElem.coerce(0)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.values)

    def is_zero(self) -> bool:
        return not self.values

    def __call__(self, a) -> FieldElem:
        return apply_derivation(self, a)

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.id == other.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __add__(self, other: "Derivation") -> "Derivation":
        return _combine(self, other, 1, f"({self.id}+{other.id})")

    def __sub__(self, other: "Derivation") -> "Derivation":
        return _combine(self, other, -1, f"({self.id}-{other.id})")

    def __rmul__(self, c) -> "Derivation":
        c = FieldElem.coerce(c)
        vals = {v: c * val for v, val in self.values}
        return make_derivation(vals, id=f"({c.serialize()})*{self.id}")

    def __repr__(self) -> str:
        return f"Derivation({self.id})"

    def describe(self) -> str:
        body = ", ".join(f"{var_name(v)}->{val.serialize()}" for v, val in self.values)
        return f"{self.id}[{body}]"


def _combine(a: Derivation, b: Derivation, sign: int, name: str) -> Derivation:
    vals: Dict[int, FieldElem] = {v: val for v, val in a.values}
    for v, val in b.values:
        prev = vals.get(v, FieldElem.coerce(0))
        vals[v] = prev + val if sign > 0 else prev - val
    return make_derivation(vals, id=name)


def _var_key(k) -> int:
    if isinstance(k, int):
        return k
    if isinstance(k, str):
        if k == "t":
            return T_VAR
        if k.startswith("e") and k[1:].isdigit():
            return int(k[1:])
    raise ValueError(f"unknown basis variable {k!r}")


def make_derivation(values: Mapping, id: str | None = None) -> Derivation:
    """The unique derivation with the given values on the transcendence basis.

    Keys are variable indices (0 for t) or names ("t", "e1", ...); unlisted
    basis elements are sent to 0.
    """
    reg = current_registry()
    clean: Dict[int, FieldElem] = {}
    for k, val in values.items():
        var = _var_key(k)
        if var != T_VAR and not reg.is_registered(var):
            raise UnregisteredGenerator(f"derivation value given on unregistered e{var}")
        val = FieldElem.coerce(val)
        if val.is_symbolic:
            for g in val.generators():
                if not reg.is_registered(g):
                    raise UnregisteredGenerator(f"derivation value mentions unregistered e{g}")
            if val.ratfunc.is_zero():
                continue
        clean[var] = val
    items = tuple(sorted(clean.items()))
    if id is None:
        body = ",".join(f"{var_name(v)}:{val.serialize()}" for v, val in items)
        id = f"D{{{body}}}"
    return Derivation(id, items)


def canonical_derivation(i: int) -> Derivation:
    """d_i: zero on t, Kronecker delta on the generators."""
    return make_derivation({i: 1}, id=f"d{i}")


def zero_derivation() -> Derivation:
    return Derivation("0", ())


def apply_derivation(D: Derivation, a) -> FieldElem:
    """D(a) by the chain rule; Hensel-root leaves use their own derivative rule."""
    a = FieldElem.coerce(a)
    if a.ratfunc is not None:
        return _apply_symbolic(D, a.ratfunc)
    op = a.node[0]
    if op == "add":
        return D(a.node[1]) + D(a.node[2])
    if op == "neg":
        return -D(a.node[1])
    if op == "mul":
        x, y = a.node[1], a.node[2]
        return x * D(y) + y * D(x)
    if op == "inv":
        x = a.node[1]
        return -D(x) * (a * a)
    if op == "leaf":
        return a.node[1].derive(D)
    raise AssertionError(op)


def _apply_symbolic(D: Derivation, r: RatFunc) -> FieldElem:
    present = r.vars()
    total = FieldElem.coerce(0)
    for v, val in D.values:
        if v in present:
            total = total + FieldElem(formal_partial(r, v)) * val
    return total


# ---------------------------------------------------------------------------
# linear algebra over K


def _require_symbolic(x: FieldElem, what: str) -> RatFunc:
    if x.ratfunc is None:
        raise UnsupportedTier(f"{what} needs symbolic-tier entries")
    return x.ratfunc


def rref(rows: List[List[RatFunc]]) -> Tuple[List[List[RatFunc]], List[int]]:
    """Reduced row echelon form over K; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: List[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def determinant(matrix: Sequence[Sequence]) -> FieldElem:
    """Determinant over K by Gaussian elimination (symbolic entries)."""
    m = [[_require_symbolic(FieldElem.coerce(x), "determinant") for x in row] for row in matrix]
    n = len(m)
    det = RatFunc.const(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
        if piv is None:
            return FieldElem.coerce(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if not m[i][c].is_zero():
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return FieldElem(det)


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> List[FieldElem]:
    """Solve matrix * x = rhs exactly over K (square, nonsingular)."""
    n = len(matrix)
    aug = [
        [_require_symbolic(FieldElem.coerce(x), "solve") for x in row]
        + [_require_symbolic(FieldElem.coerce(rhs[i]), "solve")]
        for i, row in enumerate(matrix)
    ]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise InvalidElement("singular system")
    return [FieldElem(red[i][n]) for i in range(n)]


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    certificate: Tuple[FieldElem, ...] | None = None
    rank: int = 0


def linear_independence(ds: Sequence[Derivation]) -> IndependenceResult:
    """Exact K-rank test of the values matrix (rows = derivations)."""
    if not ds:
        raise ValueError("need at least one derivation")
    cols = sorted({v for D in ds for v in D.support})
    if not cols:
        cert = tuple(FieldElem.coerce(1 if i == 0 else 0) for i in range(len(ds)))
        return IndependenceResult(False, cert, 0)
    # columns of the transpose are the derivations; its kernel is the relation space
    transpose = [[_require_symbolic(D.value(v), "linear_independence") for D in ds] for v in cols]
    red, pivots = rref(transpose)
    n = len(ds)
    if len(pivots) == n:
        return IndependenceResult(True, None, n)
    free = next(c for c in range(n) if c not in pivots)
    cert = [RatFunc.const(0)] * n
    cert[free] = RatFunc.const(-1)
    for row, p in enumerate(pivots):
        cert[p] = red[row][free]
    return IndependenceResult(False, tuple(FieldElem(c) for c in cert), len(pivots))


def constant_field_contains(D: Derivation, a) -> bool:
    """a in Cons(D), decided symbolically."""
    a = FieldElem.coerce(a)
    if not a.is_symbolic:
        raise UnsupportedTier("constant-field membership is decided on symbolic elements only")
    val = D(a)
    return val.is_symbolic and val.ratfunc.is_zero()


# ---------------------------------------------------------------------------
# witnesses living at the field level


def generator_truncation(j: int, prec: int) -> FieldElem:
    """Taylor polynomial of the series registered for e_j, below t^prec."""
    reg = current_registry()
    coeffs = reg.generator_coeffs(j, max(prec, 0))
    return FieldElem(laurent_to_ratfunc(TruncSeries.make(0, coeffs, max(prec, 0))))


def continuity_refutation(D: Derivation, N: int, max_shift: int = 8) -> FieldElem:
    """Some a with v(a) >= N but v(D(a)) <= 0.

    Candidates are t^-k (e_j - [e_j truncated below t^(N+k)]) in registry
    order; each is checked literally before it is returned.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if D.is_zero():
        raise NoWitnessFound("the zero derivation is continuous")
    reg = current_registry()
    wanted = [v for v in D.support if v != T_VAR]
    order = wanted + [j for j in range(1, len(reg) + 1) if j not in wanted]
    for j in order:
        ej = gen(j)
        for k in range(max_shift + 1):
            a = (ej - generator_truncation(j, N + k)) * t_power(-k)
            if not a.in_ball(0, N):
                continue
            da = D(a)
            if not series_mod(da, 1).is_zero():
                return a
    raise NoWitnessFound(f"no refutation for {D.id} at N={N} in the search family")


def dense_independent_enumerator(target, avoid: Iterable = ()) -> FieldElem:
    """A point of the ball ``target`` carrying a freshly minted generator.

    Returns trunc(center) + t^radius * e_new, where trunc(center) is the
    Laurent polynomial of the center below t^radius.  The new generator is
    independent of everything minted before, so the point is algebraically
    independent over Q(t) from ``avoid``.
    """
    for x in avoid:
        if not FieldElem.coerce(x).is_symbolic:
            raise UnsupportedTier("avoid-set elements must be symbolic")
    reg = current_registry()
    fresh = reg.mint()
    center = FieldElem.coerce(target.center)
    r = target.radius
    point = truncation(center, r) + t_power(r) * gen(fresh)
    if not point.in_ball(center, r):
        raise PrecisionExhausted("truncated center did not land in the target ball")
    return point
