"""Exact coefficient rings.

Three layers:

* ``Poly``: sparse multivariate polynomial over Q, keyed by exponent tuples.
* ``FnRing`` / ``FnElem``: a polynomial ring localized at finitely many
  nonzero polynomials (the multiplicative-set generators).  An element is a
  numerator polynomial over a product of generator powers, so every
  denominator is a unit by construction.
* ``QQ``: the rationals themselves, with the same small ring interface
  (``zero``, ``one``, ``coerce``, ``is_unit``, ``inv``, ``derive``) so that
  series and matrix code can be written once for both.

Everything is immutable after construction.
"""
from __future__ import annotations

import operator
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

from avjets.errors import DenominatorNotInvertible, DenominatorVanishes, MixedContext, NonUnit

Exps = tuple


def _norm(c):
    """Store integral coefficients as int: int arithmetic is far cheaper than Fraction."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"not a rational: {c!r}")


class Poly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients.

    Coefficients are stored as ``int`` when integral and ``Fraction`` otherwise;
    read them through ``coeff`` or ``constant`` to always get a Fraction.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exps, object] | Iterable = ()):
        self.nvars = nvars
        clean = {}
        for e, c in dict(terms).items():
            c = as_fraction(c)
            if c:
                e = tuple(e)
                if len(e) != nvars or min(e, default=0) < 0:
                    raise ValueError(f"bad exponent {e} for {nvars} variables")
                clean[e] = _norm(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> Poly:
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        c = _norm(as_fraction(c))
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Exps, c=1) -> Poly:
        c = _norm(as_fraction(c))
        return cls._raw(len(exps), {tuple(exps): c} if c else {})

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant(self) -> Fraction:
        return Fraction(self.terms.get((0,) * self.nvars, 0))

    def coeff(self, e: Exps) -> Fraction:
        return Fraction(self.terms.get(tuple(e), 0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(self.nvars, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise MixedContext(f"polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = _norm(v)
                else:
                    del out[e]
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def scale(self, c) -> Poly:
        c = as_fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: _norm(v * c) for e, v in self.terms.items()})

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        # accumulate over a common denominator with plain ints: one gcd per
        # output term instead of one per term product
        d1, n1 = self._integral()
        d2, n2 = other._integral()
        out: dict = {}
        add = operator.add
        get = out.get
        for e1, c1 in n1:
            for e2, c2 in n2:
                e = tuple(map(add, e1, e2))
                out[e] = get(e, 0) + c1 * c2
        den = d1 * d2
        if den == 1:
            return Poly._raw(self.nvars, {e: c for e, c in out.items() if c})
        return Poly._raw(self.nvars, {e: _norm(Fraction(c, den)) for e, c in out.items() if c})

    def _integral(self):
        """(D, [(e, int)]) with self = (1/D) * sum int * x^e."""
        den = 1
        for c in self.terms.values():
            q = c.denominator
            if q != 1:
                den = den * q // gcd(den, q)
        return den, [(e, c.numerator * (den // c.denominator)) for e, c in self.terms.items()]

    def __rmul__(self, other) -> Poly:
        return self.__mul__(other)

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def derive(self, i: int) -> Poly:
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = _norm(c * k)
        return Poly._raw(self.nvars, out)

    def relabel(self, index_map: Sequence[int], nvars: int) -> Poly:
        """Substitute variable i -> variable index_map[i] of an ``nvars``-variable ring."""
        out: dict = {}
        for e, c in self.terms.items():
            new = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    new[index_map[i]] += k
            new = tuple(new)
            v = out.get(new, 0) + c
            if v:
                out[new] = _norm(v)
            else:
                out.pop(new, None)
        return Poly._raw(nvars, out)

    def exact_div(self, d: Poly) -> Poly | None:
        """Quotient if ``d`` divides ``self`` exactly, else None."""
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lt = max(d.terms)
        lc = d.terms[lt]
        rem = self
        quot: dict = {}
        while rem.terms:
            e = max(rem.terms)
            if any(a < b for a, b in zip(e, lt)):
                return None
            q_exp = tuple(a - b for a, b in zip(e, lt))
            q_c = _norm(Fraction(rem.terms[e]) / lc)
            quot[q_exp] = _norm(quot.get(q_exp, 0) + q_c)
            rem = rem - Poly._raw(self.nvars, {q_exp: q_c}) * d
        return Poly._raw(self.nvars, {e: c for e, c in quot.items() if c})

    def evaluate(self, values: Sequence, one=Fraction(1)):
        """Substitute ``values`` (any ring elements supporting + and *)."""
        if len(values) != self.nvars:
            raise MixedContext(f"{len(values)} values for {self.nvars} variables")
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = one if k == 0 else power(i, k - 1) * values[i]
            return cache[key]

        total = one * 0
        for e, c in self.terms.items():
            term = one * c
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _monomial_str(e, names)
            parts.append(_signed_term(c, mono))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"Poly({self.to_str([f'x{i}' for i in range(self.nvars)])})"


def _monomial_str(e: Exps, names: Sequence[str]) -> str:
    factors = []
    for name, k in zip(names, e):
        if k == 1:
            factors.append(name)
        elif k:
            factors.append(f"{name}^{k}")
    return "*".join(factors)


def _coef_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _signed_term(c: Fraction, mono: str) -> tuple[str, str]:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not mono:
        return sign, _coef_str(a)
    if a == 1:
        return sign, mono
    return sign, f"{_coef_str(a)}*{mono}"


def _join_terms(parts: list[tuple[str, str]]) -> str:
    out = ""
    for k, (sign, body) in enumerate(parts):
        if k == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


class RationalField:
    """Q as a coefficient ring."""

    names: tuple = ()
    denominators: tuple = ()
    n = 0

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, x) -> Fraction:
        if isinstance(x, FnElem):
            if x.is_constant():
                return x.constant_value()
            raise MixedContext(f"{x} is not a rational constant")
        return as_fraction(x)

    def is_unit(self, x) -> bool:
        return x != 0

    def inv(self, x) -> Fraction:
        if x == 0:
            raise NonUnit("0 is not invertible")
        return 1 / as_fraction(x)

    def derive(self, x, j: int) -> Fraction:
        return Fraction(0)

    def evaluate(self, x, point) -> Fraction:
        return as_fraction(x)

    def render(self, x) -> str:
        return _coef_str(as_fraction(x))


QQ = RationalField()


class FnRing:
    """Q[names] localized at the given denominator polynomials."""

    def __init__(self, names: Sequence[str], denominators: Sequence[Poly] = ()):
        self.names = tuple(names)
        self.n = len(self.names)
        if len(set(self.names)) != self.n:
            raise ValueError(f"repeated variable names in {self.names}")
        dens = []
        for d in denominators:
            if not isinstance(d, Poly) or d.nvars != self.n:
                raise MixedContext(f"denominator {d!r} is not a polynomial in {self.names}")
            if d.is_zero():
                raise ValueError("zero polynomial in the multiplicative set")
            if d.is_constant():
                continue
            # normalize to leading coefficient 1 so rings compare structurally
            d = d.scale(1 / d.coeff(max(d.terms)))
            if d not in dens:
                dens.append(d)
        self.denominators = tuple(dens)
        self._den_cache: dict = {}

    def __repr__(self) -> str:
        base = f"Q[{','.join(self.names)}]"
        if self.denominators:
            base += "_(" + ",".join(d.to_str(self.names) for d in self.denominators) + ")"
        return base

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (isinstance(other, FnRing) and self.names == other.names
                and set(self.denominators) == set(other.denominators))

    def __hash__(self) -> int:
        return hash((self.names, frozenset(self.denominators)))

    # -- constructors -----------------------------------------------------
    def _make(self, num: Poly, exps: Exps) -> FnElem:
        return FnElem._reduced(self, num, exps)

    def _zero_exps(self) -> Exps:
        return (0,) * len(self.denominators)

    @property
    def zero(self) -> FnElem:
        return FnElem(self, Poly.zero(self.n), self._zero_exps())

    @property
    def one(self) -> FnElem:
        return FnElem(self, Poly.const(self.n, 1), self._zero_exps())

    def const(self, c) -> FnElem:
        return FnElem(self, Poly.const(self.n, c), self._zero_exps())

    def var(self, i) -> FnElem:
        if isinstance(i, str):
            i = self.names.index(i)
        return FnElem(self, Poly.var(self.n, i), self._zero_exps())

    def gens(self) -> tuple:
        return tuple(self.var(i) for i in range(self.n))

    def from_poly(self, p: Poly) -> FnElem:
        if p.nvars != self.n:
            raise MixedContext("polynomial has the wrong number of variables")
        return FnElem(self, p, self._zero_exps())

    def denominator_elem(self, k: int) -> FnElem:
        return self.from_poly(self.denominators[k])

    def den_power(self, exps: Exps) -> Poly:
        p = self._den_cache.get(exps)
        if p is None:
            p = Poly.const(self.n, 1)
            for d, e in zip(self.denominators, exps):
                if e:
                    p = p * d ** e
            self._den_cache[exps] = p
        return p

    def coerce(self, x) -> FnElem:
        if isinstance(x, FnElem):
            if x.ring == self:
                return x
            return self.embed(x)
        if isinstance(x, Poly):
            return self.from_poly(x)
        return self.const(x)

    def embed(self, x: FnElem) -> FnElem:
        """Map an element of another ring into this one, matching variables by name."""
        values = []
        for name in x.ring.names:
            if name not in self.names:
                raise MixedContext(f"variable {name} not in {self}")
            values.append(self.var(name))
        return x.substitute(self, values)

    # -- ring interface used by generic code ------------------------------
    def is_unit(self, x) -> bool:
        try:
            self.coerce(x).inverse()
        except NonUnit:
            return False
        return True

    def inv(self, x) -> FnElem:
        return self.coerce(x).inverse()

    def derive(self, x, j: int) -> FnElem:
        return self.coerce(x).derive(j)

    def evaluate(self, x, point) -> Fraction:
        return self.coerce(x).evaluate(point)

    def render(self, x) -> str:
        return str(self.coerce(x))

    def with_denominators(self, extra: Sequence[Poly]) -> FnRing:
        return FnRing(self.names, tuple(self.denominators) + tuple(extra))


class FnElem:
    """``num / prod(denominators[k] ** exps[k])`` in an ``FnRing``."""

    __slots__ = ("ring", "num", "exps")

    def __init__(self, ring: FnRing, num: Poly, exps: Exps):
        if num.nvars != ring.n or len(exps) != len(ring.denominators):
            raise MixedContext("element does not match its ring")
        r = FnElem._reduced(ring, num, tuple(exps))
        self.ring, self.num, self.exps = r.ring, r.num, r.exps

    @classmethod
    def _reduced(cls, ring: FnRing, num: Poly, exps: Exps) -> FnElem:
        if num.is_zero():
            exps = (0,) * len(exps)
        elif any(exps):
            exps = list(exps)
            for k, d in enumerate(ring.denominators):
                while exps[k] > 0:
                    q = num.exact_div(d)
                    if q is None:
                        break
                    num = q
                    exps[k] -= 1
            exps = tuple(exps)
        obj = object.__new__(cls)
        obj.ring, obj.num, obj.exps = ring, num, exps
        return obj

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return not any(self.exps) and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant()

    def _lift(self, other) -> FnElem | None:
        if isinstance(other, FnElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise MixedContext(f"elements of {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        if isinstance(other, Poly):
            return self.ring.from_poly(other)
        return None

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except MixedContext:
            return False
        if other is None:
            return NotImplemented
        if self.exps == other.exps:
            return self.num == other.num
        e = tuple(map(max, self.exps, other.exps))
        a = self.num * self.ring.den_power(tuple(x - y for x, y in zip(e, self.exps)))
        b = other.num * self.ring.den_power(tuple(x - y for x, y in zip(e, other.exps)))
        return a == b

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> FnElem:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.exps == other.exps:
            return self.ring._make(self.num + other.num, self.exps)
        e = tuple(map(max, self.exps, other.exps))
        ring = self.ring
        a = self.num * ring.den_power(tuple(x - y for x, y in zip(e, self.exps)))
        b = other.num * ring.den_power(tuple(x - y for x, y in zip(e, other.exps)))
        return ring._make(a + b, e)

    __radd__ = __add__

    def __neg__(self) -> FnElem:
        return FnElem._reduced(self.ring, -self.num, self.exps)

    def __sub__(self, other) -> FnElem:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> FnElem:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> FnElem:
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero
            return FnElem._reduced(self.ring, self.num.scale(other), self.exps)
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.ring._make(self.num * other.num, tuple(map(operator.add, self.exps, other.exps)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> FnElem:
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> FnElem:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> FnElem:
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> FnElem:
        """Inverse in the ring; raises NonUnit unless the numerator is a constant
        times a product of multiplicative-set generators."""
        if self.num.is_zero():
            raise NonUnit("zero is not a unit")
        num = self.num
        powers = [0] * len(self.ring.denominators)
        for k, d in enumerate(self.ring.denominators):
            while not num.is_constant():
                q = num.exact_div(d)
                if q is None:
                    break
                num = q
                powers[k] += 1
        if not num.is_constant():
            raise NonUnit(f"{self} is not a unit of {self.ring}")
        c = num.constant()
        return FnElem._reduced(self.ring, self.ring.den_power(self.exps).scale(1 / c), tuple(powers))

    def derive(self, j: int) -> FnElem:
        ring = self.ring
        result = ring._make(self.num.derive(j), self.exps)
        for k, e in enumerate(self.exps):
            if e:
                dk = ring.denominators[k]
                ddk = dk.derive(j)
                if ddk.is_zero():
                    continue
                exps = list(self.exps)
                exps[k] += 1
                result = result + ring._make(self.num * ddk.scale(-e), tuple(exps))
        return result

    def evaluate(self, point: Sequence) -> Fraction:
        point = [as_fraction(p) for p in point]
        top = self.num.evaluate(point)
        bottom = Fraction(1)
        for d, e in zip(self.ring.denominators, self.exps):
            if e:
                v = d.evaluate(point)
                if v == 0:
                    raise DenominatorVanishes(f"{d.to_str(self.ring.names)} vanishes at {tuple(point)}")
                bottom *= v ** e
        return top / bottom

    def rename(self, target: FnRing, index_map: Sequence[int]) -> FnElem:
        """Variable-to-variable substitution x_i -> target.var(index_map[i]).

        Much cheaper than ``substitute``; falls back to it when a denominator
        of this ring does not relabel onto a denominator of ``target``.
        """
        plan = _rename_plan(self.ring, target, tuple(index_map))
        if plan is None:
            return self.substitute(target, [target.var(k) for k in index_map])
        num = self.num.relabel(index_map, target.n)
        exps = [0] * len(target.denominators)
        for (k, scale), e in zip(plan, self.exps):
            if e:
                exps[k] += e
                num = num.scale(scale ** e)
        return FnElem._reduced(target, num, tuple(exps))

    def substitute(self, target, values: Sequence):
        """Ring map sending this ring's variables to ``values`` in ``target``."""
        one = target.one
        top = self.num.evaluate(values, one)
        for d, e in zip(self.ring.denominators, self.exps):
            if e:
                v = d.evaluate(values, one)
                try:
                    top = top * target.inv(v) ** e
                except NonUnit as exc:
                    raise DenominatorNotInvertible(
                        f"{d.to_str(self.ring.names)} does not map to a unit of {target}") from exc
        return top

    # -- rendering --------------------------------------------------------
    def __str__(self) -> str:
        names = self.ring.names
        if not any(self.exps):
            return self.num.to_str(names)
        if len(self.num.terms) == 1 and all(len(d.terms) == 1 and d.terms[max(d.terms)] == 1
                                            for d, e in zip(self.ring.denominators, self.exps) if e):
            # Laurent monomial: fold the denominator into negative exponents
            (e_num, c), = self.num.terms.items()
            total = list(e_num)
            for d, e in zip(self.ring.denominators, self.exps):
                if e:
                    (ed, _), = d.terms.items()
                    total = [a - e * b for a, b in zip(total, ed)]
            factors = []
            for name, k in zip(names, total):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            sign, body = _signed_term(c, mono)
            return body if sign == "+" else f"-{body}"
        den = reduce(lambda a, b: a * b,
                     [d ** e for d, e in zip(self.ring.denominators, self.exps) if e])
        return f"({self.num.to_str(names)})/({den.to_str(names)})"

    def __repr__(self) -> str:
        return f"FnElem({self} in {self.ring})"


_RENAME_PLANS: dict = {}


def _rename_plan(source: FnRing, target: FnRing, index_map: tuple):
    """For each source denominator: (target index, c) with d(relabelled) = target_d / c."""
    key = (source, target, index_map)
    if key in _RENAME_PLANS:
        return _RENAME_PLANS[key]
    plan = []
    for d in source.denominators:
        r = d.relabel(index_map, target.n)
        lead = r.coeff(max(r.terms))
        normal = r.scale(1 / lead)
        try:
            k = target.denominators.index(normal)
        except ValueError:
            plan = None
            break
        # d = lead * target_d, so 1/d = (1/lead) / target_d
        plan.append((k, 1 / lead))
    _RENAME_PLANS[key] = plan
    return plan


def laurent_ring(*names: str) -> FnRing:
    """Q[names] with every variable inverted."""
    n = len(names)
    return FnRing(names, [Poly.var(n, i) for i in range(n)])


def poly_ring(*names: str) -> FnRing:
    return FnRing(names)
