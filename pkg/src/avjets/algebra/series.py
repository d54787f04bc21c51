"""Truncated multivariate power series K[[X_1..X_n]] / m^(N+1).

Coefficients live in a coefficient ring (``QQ`` or an ``FnRing``); the series
variables are anonymous and indexed ``0..n-1``.  Storage is a dict from
multi-index to nonzero coefficient, so structural equality is mathematical
equality.  Every operation checks that ring, variable count and truncation
order agree; mixing them is an error, never a coercion.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Mapping, Sequence

from avjets.algebra.rings import QQ, FnElem, FnRing, as_fraction
from avjets.errors import MixedContext, NonUnit, NonUnitConstantTerm, NonzeroConstantTerm

MultiIndex = tuple


# -- multi-index helpers ---------------------------------------------------

def mi_degree(s: MultiIndex) -> int:
    return sum(s)


def mi_factorial(s: MultiIndex) -> int:
    out = 1
    for k in s:
        out *= math.factorial(k)
    return out


def mi_add(s: MultiIndex, t: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(s, t))


def mi_sub(s: MultiIndex, t: MultiIndex) -> MultiIndex:
    return tuple(a - b for a, b in zip(s, t))


def unit_index(n: int, j: int) -> MultiIndex:
    e = [0] * n
    e[j] = 1
    return tuple(e)


def graded_key(s: MultiIndex):
    """Graded-lex: lower total degree first, then X_1-heavy before X_2-heavy."""
    return (sum(s), tuple(-k for k in s))


@lru_cache(maxsize=None)
def monomials(n: int, max_degree: int, min_degree: int = 0) -> tuple:
    """All multi-indices with ``min_degree <= |s| <= max_degree`` in graded-lex order."""
    out = []
    for d in range(min_degree, max_degree + 1):
        block = []
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        block.sort(key=graded_key)
        out.extend(block)
    return tuple(out)


# -- series -----------------------------------------------------------------

class TruncSeries:
    __slots__ = ("ring", "nvars", "order", "coeffs")

    def __init__(self, ring, nvars: int, order: int, coeffs: Mapping | Iterable = ()):
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        self.ring = ring
        self.nvars = nvars
        self.order = order
        clean = {}
        for s, c in dict(coeffs).items():
            s = tuple(s)
            if len(s) != nvars:
                raise MixedContext(f"multi-index {s} for {nvars} variables")
            if sum(s) > order:
                continue
            c = ring.coerce(c)
            if c:
                clean[s] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, ring, nvars, order, coeffs: dict) -> TruncSeries:
        obj = object.__new__(cls)
        obj.ring, obj.nvars, obj.order, obj.coeffs = ring, nvars, order, coeffs
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars: int, order: int) -> TruncSeries:
        return cls._raw(ring, nvars, order, {})

    @classmethod
    def const(cls, ring, nvars: int, order: int, c) -> TruncSeries:
        return cls(ring, nvars, order, {(0,) * nvars: c})

    @classmethod
    def one(cls, ring, nvars: int, order: int) -> TruncSeries:
        return cls.const(ring, nvars, order, 1)

    @classmethod
    def var(cls, ring, nvars: int, order: int, i: int) -> TruncSeries:
        return cls(ring, nvars, order, {unit_index(nvars, i): 1})

    @classmethod
    def monomial(cls, ring, nvars: int, order: int, s: MultiIndex, c=1) -> TruncSeries:
        return cls(ring, nvars, order, {tuple(s): c})

    def like(self, coeffs: Mapping | Iterable = ()) -> TruncSeries:
        return TruncSeries(self.ring, self.nvars, self.order, coeffs)

    # -- inspection -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, s: MultiIndex):
        return self.coeffs.get(tuple(s), self.ring.zero)

    def constant_term(self):
        return self[(0,) * self.nvars]

    def valuation(self) -> int:
        """Lowest total degree with a nonzero coefficient (order + 1 for zero)."""
        return min((sum(s) for s in self.coeffs), default=self.order + 1)

    def homogeneous(self, d: int) -> TruncSeries:
        return self._raw(self.ring, self.nvars, self.order,
                         {s: c for s, c in self.coeffs.items() if sum(s) == d})

    def items(self) -> list:
        return sorted(self.coeffs.items(), key=lambda t: graded_key(t[0]))

    def same_context(self, other: TruncSeries) -> bool:
        return (self.nvars == other.nvars and self.order == other.order
                and (self.ring is other.ring or self.ring == other.ring))

    def _check(self, other: TruncSeries) -> None:
        if not isinstance(other, TruncSeries) or not self.same_context(other):
            raise MixedContext(f"series contexts differ: {self.context()} vs "
                               f"{other.context() if isinstance(other, TruncSeries) else other!r}")

    def context(self) -> str:
        return f"{self.ring} n={self.nvars} N={self.order}"

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncSeries):
            if not self.same_context(other):
                return False
            if self.coeffs.keys() != other.coeffs.keys():
                return False
            return all(c == other.coeffs[s] for s, c in self.coeffs.items())
        if isinstance(other, (int, Fraction, FnElem)):
            return self == self.const(self.ring, self.nvars, self.order, other)
        return NotImplemented

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def _as_series(self, other) -> TruncSeries:
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return self.const(self.ring, self.nvars, self.order, other)

    def __add__(self, other) -> TruncSeries:
        other = self._as_series(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            v = out.get(s)
            if v is None:
                out[s] = c
            else:
                v = v + c
                if v:
                    out[s] = v
                else:
                    del out[s]
        return self._raw(self.ring, self.nvars, self.order, out)

    __radd__ = __add__

    def __neg__(self) -> TruncSeries:
        return self._raw(self.ring, self.nvars, self.order, {s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other) -> TruncSeries:
        return self + (-self._as_series(other))

    def __rsub__(self, other) -> TruncSeries:
        return self._as_series(other) - self

    def scale(self, c) -> TruncSeries:
        c = self.ring.coerce(c)
        if not c:
            return self.zero(self.ring, self.nvars, self.order)
        out = {}
        for s, v in self.coeffs.items():
            w = v * c
            if w:
                out[s] = w
        return self._raw(self.ring, self.nvars, self.order, out)

    def __mul__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            if isinstance(other, (int, Fraction, FnElem)):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return self.zero(self.ring, self.nvars, self.order)
        N = self.order
        right = [(t, sum(t), c) for t, c in other.coeffs.items()]
        out: dict = {}
        for s, c1 in self.coeffs.items():
            ds = sum(s)
            for t, dt, c2 in right:
                if ds + dt > N:
                    continue
                u = tuple(a + b for a, b in zip(s, t))
                v = out.get(u)
                out[u] = c1 * c2 if v is None else v + c1 * c2
        return self._raw(self.ring, self.nvars, N, {u: c for u, c in out.items() if c})

    def __rmul__(self, other) -> TruncSeries:
        return self.__mul__(other)

    def __pow__(self, k: int) -> TruncSeries:
        if k < 0:
            return self.unit_invert() ** (-k)
        result = self.one(self.ring, self.nvars, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def derivative(self, i: int) -> TruncSeries:
        """Formal partial derivative in X_i (top-degree information is lost,
        exactly as for the underlying truncated polynomial)."""
        out = {}
        for s, c in self.coeffs.items():
            k = s[i]
            if k:
                t = list(s)
                t[i] = k - 1
                out[tuple(t)] = c * k
        return self._raw(self.ring, self.nvars, self.order, out)

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise MixedContext(f"cannot raise truncation order {self.order} to {order}")
        return self._raw(self.ring, self.nvars, order,
                         {s: c for s, c in self.coeffs.items() if sum(s) <= order})

    def extend(self, order: int) -> TruncSeries:
        """Reinterpret an exactly known polynomial at a higher order."""
        return self._raw(self.ring, self.nvars, order, dict(self.coeffs))

    def map_coeffs(self, fn: Callable, ring=None) -> TruncSeries:
        ring = self.ring if ring is None else ring
        return TruncSeries(ring, self.nvars, self.order, {s: fn(c) for s, c in self.coeffs.items()})

    def unit_invert(self) -> TruncSeries:
        c0 = self.constant_term()
        try:
            inv0 = self.ring.inv(c0)
        except NonUnit as exc:
            raise NonUnitConstantTerm(f"constant term {c0} is not a unit") from exc
        # 1/f = inv0 * sum_k u^k with u = 1 - inv0*f in m
        u = 1 - self.scale(inv0)
        total = self.one(self.ring, self.nvars, self.order)
        power = total
        for _ in range(self.order):
            power = power * u
            if not power:
                break
            total = total + power
        return total.scale(inv0)

    def compose(self, gs: Sequence[TruncSeries]) -> TruncSeries:
        """f(g_1, ..., g_n); each g_i must have zero constant term."""
        if len(gs) != self.nvars:
            raise MixedContext(f"{len(gs)} substitutions for {self.nvars} variables")
        if not gs:
            return self
        for g in gs:
            gs[0]._check(g)
            if g.constant_term():
                raise NonzeroConstantTerm("substituted series must vanish at 0")
        target = gs[0]
        if target.ring != self.ring or target.order != self.order:
            raise MixedContext("composition needs matching ring and order")
        n = self.nvars
        powers = {(0,) * n: target.one(target.ring, target.nvars, target.order)}

        def power(s):
            p = powers.get(s)
            if p is None:
                j = max(i for i, k in enumerate(s) if k)
                prev = list(s)
                prev[j] -= 1
                p = power(tuple(prev)) * gs[j]
                powers[s] = p
            return p

        out: dict = {}
        for s, c in sorted(self.coeffs.items(), key=lambda t: graded_key(t[0])):
            for u, v in power(s).coeffs.items():
                w = out.get(u)
                out[u] = v * c if w is None else w + v * c
        return self._raw(target.ring, target.nvars, target.order, {u: c for u, c in out.items() if c})

    def __call__(self, *gs: TruncSeries) -> TruncSeries:
        return self.compose(gs)

    # -- rendering --------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = ["X"] if self.nvars == 1 else [f"X{i + 1}" for i in range(self.nvars)]
        if not self.coeffs:
            return "0"
        pieces = []
        for s, c in self.items():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, s) if k)
            pieces.append(_term(self.ring.render(c), mono))
        out = pieces[0]
        if out.startswith("+ "):
            out = out[2:]
        elif out.startswith("- "):
            out = "-" + out[2:]
        for p in pieces[1:]:
            out += " " + p
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"TruncSeries({self.to_str()}; {self.context()})"


def _term(coef: str, mono: str) -> str:
    simple = coef.lstrip("-").replace("/", "").isdigit()
    neg = coef.startswith("-") and (simple or _is_single_product(coef))
    body = coef[1:] if neg else coef
    sign = "- " if neg else "+ "
    if not simple and not _is_single_product(body):
        body = f"({body})"
    if not mono:
        return sign + body
    if body == "1":
        return sign + mono
    return f"{sign}{body}*{mono}"


def _is_single_product(s: str) -> bool:
    depth = 0
    prev = ""
    for ch in s.lstrip("-"):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and prev != "^":
            return False
        elif ch == " " and depth == 0:
            return False
        prev = ch
    return True


def taylor_shift(f, order: int, ring=None, nvars: int | None = None) -> TruncSeries:
    """The jet f(x+X) = sum_s (1/s!) d^s f/dx^s X^s, truncated at ``order``.

    For an ``FnElem`` the series variables correspond to the ring's base
    variables.  A rational constant needs ``ring`` and ``nvars``.
    """
    if not isinstance(f, FnElem):
        ring = QQ if ring is None else ring
        return TruncSeries.const(ring, nvars or 0, order, f)
    ring = f.ring
    n = ring.n
    derivs = {(0,) * n: f}
    out = {}
    for s in monomials(n, order):
        if s not in derivs:
            j = max(i for i, k in enumerate(s) if k)
            prev = list(s)
            prev[j] -= 1
            derivs[s] = derivs[tuple(prev)].derive(j)
        d = derivs[s]
        if d:
            out[s] = d * Fraction(1, mi_factorial(s))
    return TruncSeries._raw(ring, n, order, out)
