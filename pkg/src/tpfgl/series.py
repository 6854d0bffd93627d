"""Truncated power series over W_N(F_q)[[z]].

Storage is sparse: a series in k variables is a dict from exponent keys
``(e_1, ..., e_k, zdeg)`` to raw Witt coefficients (see :mod:`tpfgl.coeff`).
The formal-group computations produce weighted-homogeneous laws in which
nearly all (monomial, z-degree) slots are empty, so dense triangular arrays
would mostly hold zeros.  ``coefficient(...)`` and ``coefficients()`` give the
dense, BaseSeries-valued view.

Truncation orders are fixed per object: X-degree (total degree for
several variables) <= D, z-degree <= M.  Products drop terms above these
orders, which is the ring structure of the truncated ring.  Operations that
would discard a *nonzero* term outside that structure (z -> z^p) raise.
"""
from __future__ import annotations

import math
import operator
from functools import lru_cache
from typing import ClassVar

from .coeff import PrimeParams, WittElement, WittRing, format_witt
from .errors import (
    ConstantTermError,
    IntegralityError,
    NonUnitError,
    ParameterMismatchError,
    PrecisionExhaustedError,
    ZOverflowError,
)


class BaseRing:
    """W_N(F_q)[z]/(I) with I = (z^(M+1)), or I = (E) for a monic E of degree M+1.

    The truncated case is the coefficient ring W_N(F_q)[[z]]/(z^(M+1)); the
    quotient case models rings such as O_L/p^N = W_N(F_q)[z]/(E_L(z)).
    Instances are interned, so ``is`` is a valid compatibility test.
    """

    def __init__(self, witt: WittRing, M: int, relation: tuple | None = None):
        if M < 0:
            raise ValueError(f"z-truncation M must be >= 0, got {M}")
        self.witt = witt
        self.M = M
        # relation, if given: z^(M+1) = sum_i relation[i] z^i
        self.relation = relation

    @staticmethod
    @lru_cache(maxsize=None)
    def _intern(witt, M, relation):
        return BaseRing(witt, M, relation)

    @classmethod
    def truncated(cls, params: PrimeParams, M: int) -> BaseRing:
        return cls._intern(params.witt, M, None)

    @classmethod
    def quotient(cls, params: PrimeParams, monic: list) -> BaseRing:
        """W_N(F_q)[z]/(monic), ``monic`` listed from the constant term up."""
        witt = params.witt
        coeffs = [_to_raw(witt, c) for c in monic]
        if coeffs[-1] != witt.one:
            raise ValueError("relation polynomial must be monic")
        tail = tuple(witt.neg(c) for c in coeffs[:-1])
        return cls._intern(witt, len(coeffs) - 2, tail)

    @property
    def params(self) -> PrimeParams:
        return self.witt.params

    @property
    def is_truncated(self) -> bool:
        return self.relation is None

    def at_precision(self, N: int) -> BaseRing:
        witt = self.witt.at_precision(N)
        rel = None if self.relation is None else tuple(self.witt.reduce_to(c, witt) for c in self.relation)
        return BaseRing._intern(witt, self.M, rel)

    def describe(self) -> str:
        pr = self.params
        base = f"F_{pr.q}" if pr.N == 1 else f"W_{pr.N}(F_{pr.q})"
        if self.relation is None:
            return f"{base}[[z]]/(z^{self.M + 1})"
        terms = {self.M + 1: self.witt.one}
        for i, c in enumerate(self.relation):
            if any(c):
                terms[i] = self.witt.neg(c)
        return f"{base}[z]/({format_z_poly(terms)})"

    def __repr__(self):
        return f"BaseRing({self.describe()})"

    # raw helpers ----------------------------------------------------------

    def reduce(self, terms: dict) -> dict:
        """Bring z-degrees into range and drop zeros; returns a new dict."""
        out = {k: v for k, v in terms.items() if any(v)}
        if self.relation is None:
            return {k: v for k, v in out.items() if k <= self.M}
        W, e = self.witt, self.M + 1
        while out and max(out) >= e:
            d = max(out)
            c = out.pop(d)
            for i, r in enumerate(self.relation):
                if any(r):
                    k = d - e + i
                    out[k] = W.add(out.get(k, W.zero), W.mul(c, r))
        return {k: v for k, v in out.items() if any(v)}

    def mul_raw(self, a: dict, b: dict) -> dict:
        return _mul_terms(self, _as_keyed(a), _as_keyed(b), 0, 0, unkey=True)


def _as_keyed(terms: dict) -> dict:
    return {(k,): v for k, v in terms.items()}


def _to_raw(witt: WittRing, c):
    if isinstance(c, WittElement):
        if c.ring is not witt:
            raise ParameterMismatchError(f"{c.ring!r} vs {witt!r}")
        return c.coeffs
    return witt.normalize(c)


def format_z_poly(terms: dict) -> str:
    parts = []
    for k in sorted(terms):
        w = format_witt(terms[k])
        if k == 0:
            parts.append(w)
        else:
            wrapped = f"({w})" if " + " in w else w
            parts.append(f"z^{k}*{wrapped}")
    return " + ".join(parts) if parts else "0"


def _mul_terms(ring: BaseRing, a: dict, b: dict, nv: int, D: int, unkey: bool = False) -> dict:
    """Truncated product of sparse term dicts keyed (e_1..e_nv, zdeg)."""
    W = ring.witt
    M = ring.M
    trunc = ring.relation is None
    f = W.f
    P = W.modulus
    if nv:
        bl = sorted(((sum(k[:nv]), k, v) for k, v in b.items()), key=operator.itemgetter(0))
    else:
        bl = [(0, k, v) for k, v in b.items()]
    add = operator.add
    acc: dict = {}
    for ka, va in a.items():
        lim = D - sum(ka[:nv]) if nv else 0
        za = ka[-1]
        for db, kb, vb in bl:
            if db > lim:
                break
            if trunc and za + kb[-1] > M:
                continue
            key = tuple(map(add, ka, kb))
            if f == 1:
                acc[key] = acc.get(key, 0) + va[0] * vb[0]
            else:
                cur = acc.get(key)
                if cur is None:
                    cur = acc[key] = [0] * (2 * f - 1)
                for i, x in enumerate(va):
                    if x:
                        for j, y in enumerate(vb):
                            cur[i + j] += x * y
    if f == 1:
        out = {k: (v % P,) for k, v in acc.items() if v % P}
    else:
        out = {}
        for k, v in acc.items():
            r = W._reduce_poly(v)
            if any(r):
                out[k] = r
    if not trunc:
        out = _reduce_keyed(ring, out)
    if unkey:
        return {k[0]: v for k, v in out.items()}
    return out


def _reduce_keyed(ring: BaseRing, terms: dict) -> dict:
    groups: dict = {}
    for k, v in terms.items():
        groups.setdefault(k[:-1], {})[k[-1]] = v
    out = {}
    for mono, zt in groups.items():
        for z, v in ring.reduce(zt).items():
            out[mono + (z,)] = v
    return out


def _add_terms(W: WittRing, a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    op = W.add if sign > 0 else W.sub
    for k, v in b.items():
        cur = out.get(k)
        if cur is None:
            out[k] = v if sign > 0 else W.neg(v)
        else:
            s = op(cur, v)
            if any(s):
                out[k] = s
            else:
                del out[k]
    return out


class BaseSeries:
    """A truncated element of W_N(F_q)[[z]] (or of a quotient BaseRing)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: BaseRing, coeffs=None):
        self.ring = ring
        W = ring.witt
        if coeffs is None:
            terms = {}
        elif isinstance(coeffs, dict):
            terms = {int(k): _to_raw(W, v) for k, v in coeffs.items()}
        elif isinstance(coeffs, (int, WittElement)):
            terms = {0: _to_raw(W, coeffs)}
        else:
            terms = {k: _to_raw(W, v) for k, v in enumerate(coeffs)}
        if ring.is_truncated and any(k > ring.M and any(v) for k, v in terms.items()):
            raise ValueError(f"nonzero coefficient beyond z^{ring.M}")
        self.terms = ring.reduce(terms)

    @classmethod
    def _wrap(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring, obj.terms = ring, terms
        return obj

    @classmethod
    def z(cls, ring: BaseRing, k: int = 1) -> BaseSeries:
        return cls(ring, {k: 1})

    @classmethod
    def one(cls, ring: BaseRing) -> BaseSeries:
        return cls(ring, {0: 1})

    def _coerce(self, other) -> dict:
        if isinstance(other, BaseSeries):
            if other.ring is not self.ring:
                raise ParameterMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other.terms
        if isinstance(other, (int, WittElement)):
            raw = _to_raw(self.ring.witt, other)
            return {0: raw} if any(raw) else {}
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, _add_terms(self.ring.witt, self.terms, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, _add_terms(self.ring.witt, self.terms, o, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        W = self.ring.witt
        return self._wrap(self.ring, {k: W.neg(v) for k, v in self.terms.items()})

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, self.ring.mul_raw(self.terms, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = BaseSeries.one(self.ring), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __getitem__(self, k: int) -> WittElement:
        return WittElement._wrap(self.ring.witt, self.terms.get(k, self.ring.witt.zero))

    def __repr__(self):
        return f"BaseSeries({self})"

    def __str__(self):
        return format_z_poly(self.terms)

    def coefficients(self) -> list[WittElement]:
        return [self[k] for k in range(self.ring.M + 1)]

    def degree(self) -> int:
        """Highest nonzero z-degree, -1 for zero."""
        return max(self.terms, default=-1)

    def z_valuation(self) -> float:
        return min(self.terms, default=math.inf)

    def p_valuation(self) -> float:
        W = self.ring.witt
        return min((W.valuation(v) for v in self.terms.values()), default=math.inf)

    def is_unit(self) -> bool:
        c = self.terms.get(0)
        return c is not None and self.ring.witt.is_unit(c)

    def inverse(self) -> BaseSeries:
        if not self.is_unit():
            raise NonUnitError(f"{self} is not a unit")
        W = self.ring.witt
        h = BaseSeries._wrap(self.ring, {0: W.inverse(self.terms[0])})
        one = BaseSeries.one(self.ring)
        # the error 1 - a*h squares each step and is nilpotent
        for _ in range(64):
            err = one - self * h
            if not err:
                return h
            h = h + h * err
        raise ArithmeticError("series inverse did not converge")  # pragma: no cover

    def at_precision(self, N: int) -> BaseSeries:
        """Reduce (N smaller) or lift canonical representatives (N larger)."""
        ring = self.ring.at_precision(N)
        P = ring.witt.modulus
        return BaseSeries._wrap(ring, ring.reduce({k: tuple(c % P for c in v) for k, v in self.terms.items()}))

    def frobenius_sub(self) -> BaseSeries:
        return base_frobenius_sub(self)


def base_frobenius_sub(s: BaseSeries) -> BaseSeries:
    """Apply σ to every coefficient and substitute z -> z^p.

    Raises ZOverflowError if a nonzero term would land beyond z^M.
    """
    ring = s.ring
    if not ring.is_truncated:
        raise ValueError("z -> z^p is only defined here on truncated rings")
    p = ring.params.p
    if p * s.degree() > ring.M:
        raise ZOverflowError(f"z -> z^{p} needs M >= {p * s.degree()}, ring has M = {ring.M}")
    W = ring.witt
    return BaseSeries._wrap(ring, {p * k: W.frobenius(v) for k, v in s.terms.items()})


# multivariate series ------------------------------------------------------


class _MultiSeries:
    """Truncated series in ``nvars`` variables over a BaseRing, total degree <= D."""

    nvars: ClassVar[int] = 0
    __slots__ = ("ring", "D", "terms")

    def __init__(self, ring: BaseRing, D: int, coeffs=None):
        self.ring = ring
        self.D = D
        terms: dict = {}
        for mono, c in (coeffs or {}).items():
            mono = (mono,) if isinstance(mono, int) else tuple(mono)
            if len(mono) != self.nvars:
                raise ValueError(f"expected {self.nvars} exponents, got {mono}")
            if sum(mono) > D:
                continue
            if not isinstance(c, BaseSeries):
                c = BaseSeries(ring, c)
            elif c.ring is not ring:
                raise ParameterMismatchError(f"{c.ring!r} vs {ring!r}")
            for z, v in c.terms.items():
                terms[mono + (z,)] = v
        self.terms = terms

    @classmethod
    def _wrap(cls, ring, D, terms):
        obj = cls.__new__(cls)
        obj.ring, obj.D, obj.terms = ring, D, terms
        return obj

    @classmethod
    def zero(cls, ring: BaseRing, D: int):
        return cls._wrap(ring, D, {})

    @classmethod
    def constant(cls, ring: BaseRing, D: int, c):
        if not isinstance(c, BaseSeries):
            c = BaseSeries(ring, c)
        zeros = (0,) * cls.nvars
        return cls._wrap(ring, D, {zeros + (z,): v for z, v in c.terms.items()})

    @classmethod
    def variable(cls, ring: BaseRing, D: int, index: int = 0):
        mono = tuple(1 if i == index else 0 for i in range(cls.nvars))
        if D < 1:
            return cls.zero(ring, D)
        return cls._wrap(ring, D, {mono + (0,): ring.witt.one})

    @classmethod
    def monomial(cls, ring: BaseRing, D: int, exps, c=1):
        return cls(ring, D, {tuple(exps) if not isinstance(exps, int) else exps: c})

    # structure -------------------------------------------------------------

    def _check(self, other):
        if type(other) is not type(self):
            raise ParameterMismatchError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ring is not self.ring or other.D != self.D:
            raise ParameterMismatchError(
                f"{self.ring.describe()}, D={self.D} vs {other.ring.describe()}, D={other.D}"
            )

    def _scalar_terms(self, c) -> dict:
        if isinstance(c, BaseSeries):
            if c.ring is not self.ring:
                raise ParameterMismatchError(f"{c.ring!r} vs {self.ring!r}")
            return c.terms
        raw = _to_raw(self.ring.witt, c)
        return {0: raw} if any(raw) else {}

    def scalar_mul(self, c):
        """Multiply by an element of the coefficient ring."""
        s = self._scalar_terms(c)
        keyed = {(0,) * self.nvars + (z,): v for z, v in s.items()}
        return self._wrap(self.ring, self.D, _mul_terms(self.ring, self.terms, keyed, self.nvars, self.D))

    def __add__(self, other):
        if isinstance(other, (int, WittElement, BaseSeries)):
            other = self.constant(self.ring, self.D, other)
        self._check(other)
        return self._wrap(self.ring, self.D, _add_terms(self.ring.witt, self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, WittElement, BaseSeries)):
            other = self.constant(self.ring, self.D, other)
        self._check(other)
        return self._wrap(self.ring, self.D, _add_terms(self.ring.witt, self.terms, other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        W = self.ring.witt
        return self._wrap(self.ring, self.D, {k: W.neg(v) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, WittElement, BaseSeries)):
            return self.scalar_mul(other)
        if not isinstance(other, _MultiSeries):
            return NotImplemented
        self._check(other)
        return self._wrap(self.ring, self.D, _mul_terms(self.ring, self.terms, other.terms, self.nvars, self.D))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = self.constant(self.ring, self.D, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, _MultiSeries):
            return NotImplemented
        return (
            type(other) is type(self)
            and other.ring is self.ring
            and other.D == self.D
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((type(self).__name__, id(self.ring), self.D, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"{type(self).__name__}({self}, D={self.D})"

    def __str__(self):
        names = "XYZW"[: self.nvars] if self.nvars <= 4 else [f"X{i}" for i in range(self.nvars)]
        parts = []
        for mono, c in sorted(self.coefficient_map().items(), key=lambda kv: (sum(kv[0]), kv[0][::-1])):
            m = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, mono) if e)
            cs = str(c)
            if not m:
                parts.append(cs)
            elif cs == "1":
                parts.append(m)
            else:
                parts.append(f"({cs})*{m}")
        return " + ".join(parts) if parts else "0"

    # coefficient access ------------------------------------------------------

    def coefficient_map(self) -> dict:
        """Nonzero coefficients as {exponents: BaseSeries}."""
        groups: dict = {}
        for k, v in self.terms.items():
            groups.setdefault(k[:-1], {})[k[-1]] = v
        return {m: BaseSeries._wrap(self.ring, zt) for m, zt in groups.items()}

    def coefficient(self, *exps) -> BaseSeries:
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        exps = tuple(exps)
        return BaseSeries._wrap(
            self.ring, {k[-1]: v for k, v in self.terms.items() if k[:-1] == exps}
        )

    def coefficients(self):
        """Dense view: every monomial of total degree <= D with its coefficient."""
        cmap = self.coefficient_map()
        zero = BaseSeries(self.ring)
        for mono in _monomials(self.nvars, self.D):
            yield mono, cmap.get(mono, zero)

    def homogeneous_part(self, n: int):
        nv = self.nvars
        return self._wrap(self.ring, self.D, {k: v for k, v in self.terms.items() if sum(k[:nv]) == n})

    def truncate(self, d: int):
        """Drop terms of total degree > d (keeps the declared order D)."""
        nv = self.nvars
        return self._wrap(self.ring, self.D, {k: v for k, v in self.terms.items() if sum(k[:nv]) <= d})

    def order(self) -> float:
        """Lowest total degree with a nonzero coefficient."""
        nv = self.nvars
        return min((sum(k[:nv]) for k in self.terms), default=math.inf)

    def constant_term(self) -> BaseSeries:
        return self.coefficient((0,) * self.nvars)

    def map_coefficients(self, fn, target: BaseRing):
        """Apply a coefficient-ring map ``fn: BaseSeries -> BaseSeries`` (over ``target``)."""
        out = {}
        for mono, c in self.coefficient_map().items():
            img = fn(c)
            if img.ring is not target:
                raise ParameterMismatchError("coefficient map landed in an unexpected ring")
            for z, v in img.terms.items():
                out[mono + (z,)] = v
        return self._wrap(target, self.D, out)

    def at_precision(self, N: int):
        ring = self.ring.at_precision(N)
        return self.map_coefficients(lambda c: c.at_precision(N), ring)

    def frobenius_sub(self):
        return self.map_coefficients(base_frobenius_sub, self.ring)

    def with_order(self, D: int):
        """Same series viewed at another truncation order (higher terms dropped)."""
        nv = self.nvars
        return self._wrap(self.ring, D, {k: v for k, v in self.terms.items() if sum(k[:nv]) <= D})

    def embed(self, cls, positions):
        """Relabel variable i as variable positions[i] of a series class ``cls``."""
        out = {}
        for k, v in self.terms.items():
            e = [0] * cls.nvars
            for i, pos in enumerate(positions):
                e[pos] = k[i]
            out[tuple(e) + (k[-1],)] = v
        return cls._wrap(self.ring, self.D, out)

    # substitution --------------------------------------------------------------

    def substitute(self, *args):
        """Evaluate at series ``args`` (all of one class, no constant terms).

        Returns sum_e c_e * prod_i args[i]^e_i in the class of the arguments.
        """
        if len(args) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments, got {len(args)}")
        if not args:
            raise ValueError("nothing to substitute")
        cls = type(args[0])
        for a in args:
            if type(a) is not cls or a.ring is not self.ring:
                raise ParameterMismatchError("substitution arguments must share class and ring")
            if a.constant_term():
                raise ConstantTermError("substituted series must have zero constant term")
        D = min(a.D for a in args)
        args = tuple(a.with_order(D) for a in args)
        powers = [{0: cls.constant(self.ring, D, 1), 1: a} for a in args]

        def power(i, j):
            cache = powers[i]
            if j not in cache:
                if j - 1 in cache:
                    cache[j] = cache[j - 1] * args[i]
                else:
                    # sparse exponents (p-powers in a logarithm): reuse a cached divisor
                    d = max(d for d in cache if d > 0 and j % d == 0)
                    cache[j] = cache[d] ** (j // d)
            return cache[j]

        def rec(terms: dict, depth: int):
            if depth == len(args):
                zt = {k[-1]: v for k, v in terms.items()}
                return cls.constant(self.ring, D, BaseSeries._wrap(self.ring, zt))
            groups: dict = {}
            for k, v in terms.items():
                if k[0] <= D:
                    groups.setdefault(k[0], {})[k[1:]] = v
            acc = cls.zero(self.ring, D)
            for j in sorted(groups):
                inner = rec(groups[j], depth + 1)
                if depth + 1 == len(args):
                    acc = acc + power(depth, j).scalar_mul(inner.constant_term())
                else:
                    acc = acc + power(depth, j) * inner
            return acc

        return rec(self.terms, 0)


def _monomials(nv: int, D: int):
    if nv == 0:
        yield ()
        return
    for d in range(D + 1):
        for first in range(d, -1, -1):
            for rest in _monomials_exact(nv - 1, d - first):
                yield (first,) + rest


def _monomials_exact(nv: int, d: int):
    if nv == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in _monomials_exact(nv - 1, d - first):
            yield (first,) + rest


class XSeries(_MultiSeries):
    """One-variable truncated series over a BaseRing."""

    nvars = 1
    __slots__ = ()

    def __init__(self, ring: BaseRing, D: int, coeffs=None):
        if coeffs is not None and not isinstance(coeffs, dict):
            coeffs = dict(enumerate(coeffs))
        super().__init__(ring, D, coeffs)

    def __getitem__(self, i: int) -> BaseSeries:
        return self.coefficient(i)

    def coefficient_list(self) -> list[BaseSeries]:
        return [self.coefficient(i) for i in range(self.D + 1)]

    def compose(self, g: XSeries) -> XSeries:
        return compose(self, g)

    def derivative(self) -> XSeries:
        W = self.ring.witt
        out = {}
        for (i, z), v in self.terms.items():
            if i:
                d = W.scale(v, i)
                if any(d):
                    out[(i - 1, z)] = d
        return self._wrap(self.ring, self.D, out)

    def inverse(self) -> XSeries:
        """Multiplicative inverse; needs a unit constant term."""
        c0 = self.constant_term()
        if not c0.is_unit():
            raise NonUnitError("constant term is not a unit")
        h = XSeries.constant(self.ring, self.D, c0.inverse())
        one = XSeries.constant(self.ring, self.D, 1)
        for _ in range(64):
            err = one - self * h
            if not err:
                return h
            h = h + h * err
        raise ArithmeticError("series inverse did not converge")  # pragma: no cover


class BiSeries(_MultiSeries):
    """Two-variable truncated series (total degree <= D)."""

    nvars = 2
    __slots__ = ()


class TriSeries(_MultiSeries):
    """Three-variable truncated series; used for associativity expansions."""

    nvars = 3
    __slots__ = ()


def compose(f: XSeries, g: XSeries) -> XSeries:
    """f(g(X)) to degree D; g must have zero constant term."""
    if not isinstance(f, XSeries) or not isinstance(g, XSeries):
        raise TypeError("compose expects XSeries")
    f._check(g)
    return f.substitute(g)


def revert(f: XSeries) -> XSeries:
    """Compositional inverse by Newton iteration, g <- g - (f(g) - X)/f'(g)."""
    if f.constant_term():
        raise ConstantTermError("revert needs f(0) = 0")
    c1 = f.coefficient(1)
    if not c1.is_unit():
        raise NonUnitError("linear coefficient of f is not a unit")
    X = XSeries.variable(f.ring, f.D)
    df = f.derivative()
    g = X.scalar_mul(c1.inverse())
    for _ in range(max(1, f.D).bit_length() + 64):
        err = compose(f, g) - X
        if not err:
            return g
        g = g - err * compose(df, g).inverse()
    raise ArithmeticError("reversion did not converge")  # pragma: no cover


def series_arith(op: str, a, b):
    """Dispatch ``add``, ``mul`` or ``scalar_mul`` on matching series."""
    if op == "add":
        return a + b
    if op == "mul":
        if isinstance(a, _MultiSeries) and isinstance(b, _MultiSeries):
            a._check(b)
        return a * b
    if op == "scalar_mul":
        return b.scalar_mul(a) if isinstance(b, _MultiSeries) else a * b
    raise ValueError(f"unknown op {op!r}")


# series with p-power denominators -------------------------------------------


class ValuedSeries:
    """The one-variable series p^shift * body, body integral over W_N.

    The value is known modulo p^(N + shift).  Every coefficient has tracked
    valuation ``shift + v_p(body coefficient)`` and ``v_min = shift`` is the
    floor bound.  The budget N + min(v_min, 0) >= 1 is enforced.
    """

    __slots__ = ("body", "shift")

    def __init__(self, body: XSeries, shift: int = 0):
        N = body.ring.params.N
        if N + min(shift, 0) < 1:
            raise PrecisionExhaustedError(
                f"valuation floor {shift} exhausts p-adic precision N = {N}"
            )
        self.body = body
        self.shift = shift

    @property
    def v_min(self) -> int:
        return self.shift

    @property
    def ring(self) -> BaseRing:
        return self.body.ring

    @property
    def D(self) -> int:
        return self.body.D

    @property
    def precision(self) -> int:
        """Absolute p-adic precision of the represented value."""
        return self.ring.params.N + self.shift

    def valuations(self) -> dict[int, float]:
        """Tracked p-adic valuation of each nonzero coefficient."""
        return {i: self.shift + c.p_valuation() for (i,), c in self.body.coefficient_map().items()}

    def _aligned(self, other: ValuedSeries):
        s = min(self.shift, other.shift)
        p = self.ring.params.p
        a = self.body if self.shift == s else self.body.scalar_mul(p ** (self.shift - s))
        b = other.body if other.shift == s else other.body.scalar_mul(p ** (other.shift - s))
        return a, b, s

    def _coerce(self, other):
        if isinstance(other, XSeries):
            return ValuedSeries(other, 0)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        a, b, s = self._aligned(other)
        return ValuedSeries(a + b, s)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        a, b, s = self._aligned(other)
        return ValuedSeries(a - b, s)

    def __neg__(self):
        return ValuedSeries(-self.body, self.shift)

    def __mul__(self, other):
        if isinstance(other, (int, WittElement, BaseSeries)):
            return ValuedSeries(self.body.scalar_mul(other), self.shift)
        other = self._coerce(other)
        return ValuedSeries(self.body * other.body, self.shift + other.shift)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, (ValuedSeries, XSeries)):
            return NotImplemented
        a, b, _ = self._aligned(self._coerce(other))
        return a == b

    __hash__ = None

    def __repr__(self):
        return f"ValuedSeries(p^{self.shift} * ({self.body}))"

    def scale_by_p_inverse(self, k: int = 1) -> ValuedSeries:
        return ValuedSeries(self.body, self.shift - k)

    def scale_by_p(self, k: int = 1) -> ValuedSeries:
        return ValuedSeries(self.body, self.shift + k)

    def compose(self, g: XSeries) -> ValuedSeries:
        """self(g(X)) for an integral g without constant term."""
        return ValuedSeries(compose(self.body, g), self.shift)

    def frobenius_twist(self) -> ValuedSeries:
        """Apply base_frobenius_sub to every coefficient."""
        return ValuedSeries(self.body.frobenius_sub(), self.shift)

    def is_integral(self) -> bool:
        return all(v >= 0 for v in self.valuations().values())

    def to_series(self) -> XSeries:
        """The integral series represented, over W_(N + shift) when shift < 0.

        Lossless whenever every tracked valuation is >= 0.
        """
        p = self.ring.params.p
        if self.shift >= 0:
            return self.body.scalar_mul(p**self.shift)
        k = -self.shift
        if not self.is_integral():
            raise IntegralityError(f"coefficient with negative valuation in {self!r}")
        W = self.ring.witt
        divided = {key: W.divide_by_p_power(v, k) for key, v in self.body.terms.items()}
        lowered = self.ring.at_precision(W.N - k)
        P = lowered.witt.modulus
        return XSeries._wrap(lowered, self.D, {key: tuple(c % P for c in v) for key, v in divided.items()})


def valued_ops(op: str, a: ValuedSeries, b=None):
    """Dispatch ``add``, ``mul`` or ``scale_by_p_inverse`` (b = power) on ValuedSeries."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale_by_p_inverse":
        return a.scale_by_p_inverse(1 if b is None else b)
    raise ValueError(f"unknown op {op!r}")
