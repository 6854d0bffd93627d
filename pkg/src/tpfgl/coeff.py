"""Exact arithmetic in Z/p^N, F_q and W_N(F_q).

W(F_q) is modelled at finite precision N as the unramified ring
(Z/p^N)[u]/(m~(u)), where m~ is the coefficient-wise lift of a monic
irreducible m over F_p.  Raw elements are tuples of ``f`` integers in
``[0, p^N)``; the series engine works on these tuples directly and the
element classes wrap them for interactive use.

Witt-vector coordinates are provided only as a cross-check oracle (N <= 3).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import (
    NonUnitError,
    ParameterMismatchError,
    UnsupportedPrecisionError,
    ValidationError,
)

Raw = tuple  # tuple[int, ...] of length f

MAX_EXHAUSTIVE_DEGREE = 8
MAX_ORACLE_PRECISION = 3


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def _poly_rem_mod_p(a: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of a by the monic g over F_p (coefficients low to high)."""
    r = [c % p for c in a]
    dg = len(g) - 1
    for d in range(len(r) - 1, dg - 1, -1):
        c = r[d]
        if c:
            for i in range(dg + 1):
                r[d - dg + i] = (r[d - dg + i] - c * g[i]) % p
    return r[:dg]


def is_irreducible_mod_p(m: tuple[int, ...], p: int) -> bool:
    """Exhaustive monic-factor search; only for degree <= 8."""
    f = len(m) - 1
    if f > MAX_EXHAUSTIVE_DEGREE:
        raise ValidationError(f"irreducibility check supports degree <= {MAX_EXHAUSTIVE_DEGREE}, got {f}")
    if m[-1] % p != 1:
        return False
    for d in range(1, f // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not any(_poly_rem_mod_p(list(m), list(tail) + [1], p)):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, f: int) -> tuple[int, ...]:
    """First monic irreducible of degree f over F_p, enumerating the
    non-leading coefficients (m_{f-1}, ..., m_0) lexicographically."""
    if f == 1:
        return (0, 1)
    for rev in itertools.product(range(p), repeat=f):
        m = tuple(reversed(rev)) + (1,)
        if m[0] and is_irreducible_mod_p(m, p):
            return m
    raise ValidationError(f"no irreducible polynomial of degree {f} over F_{p}")  # pragma: no cover


@dataclass(frozen=True)
class PrimeParams:
    """p, p-adic precision N, residue degree f and the modulus m defining F_q.

    ``m`` is listed from the constant coefficient up and must be monic.
    """

    p: int
    N: int = 1
    f: int = 1
    m: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError(f"p = {self.p} is not prime")
        if self.N < 1:
            raise ValidationError(f"precision N must be >= 1, got {self.N}")
        if self.f < 1:
            raise ValidationError(f"residue degree f must be >= 1, got {self.f}")
        if self.m is None:
            object.__setattr__(self, "m", default_modulus(self.p, self.f))
        else:
            m = tuple(int(c) % self.p for c in self.m)
            if len(m) != self.f + 1 or m[-1] != 1:
                raise ValidationError(f"m must be monic of degree {self.f}, got {self.m}")
            if not is_irreducible_mod_p(m, self.p):
                raise ValidationError(f"m = {m} is reducible over F_{self.p}")
            object.__setattr__(self, "m", m)

    @property
    def q(self) -> int:
        return self.p**self.f

    def with_precision(self, N: int) -> PrimeParams:
        return PrimeParams(self.p, N, self.f, self.m)

    @cached_property
    def witt(self) -> WittRing:
        return WittRing.of(self)

    @cached_property
    def residue_field(self) -> WittRing:
        return WittRing.of(self.with_precision(1))

    def fq(self, coeffs) -> FqElement:
        return FqElement(self.residue_field, coeffs)

    def element(self, coeffs) -> WittElement:
        return WittElement(self.witt, coeffs)


class WittRing:
    """Raw arithmetic in (Z/p^N)[u]/(m~(u)).

    Instances are cached per parameter set, so identity comparison is a
    valid compatibility check.
    """

    def __init__(self, params: PrimeParams):
        self.params = params
        self.p, self.N, self.f = params.p, params.N, params.f
        self.modulus = self.p**self.N
        # u^f = sum_i tail[i] u^i
        self._tail = tuple((-c) % self.modulus for c in params.m[: self.f])
        self.zero = (0,) * self.f
        self.one = (1,) + (0,) * (self.f - 1)

    @staticmethod
    @lru_cache(maxsize=None)
    def of(params: PrimeParams) -> WittRing:
        return WittRing(params)

    def __repr__(self):
        return f"WittRing(p={self.p}, N={self.N}, f={self.f}, m={self.params.m})"

    def at_precision(self, N: int) -> WittRing:
        return WittRing.of(self.params.with_precision(N))

    # raw arithmetic ----------------------------------------------------

    def normalize(self, coeffs) -> Raw:
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.f:
            return self._reduce_poly(coeffs)
        P = self.modulus
        return tuple(c % P for c in coeffs) + (0,) * (self.f - len(coeffs))

    def from_int(self, n: int) -> Raw:
        return (n % self.modulus,) + (0,) * (self.f - 1)

    def add(self, a: Raw, b: Raw) -> Raw:
        P = self.modulus
        if self.f == 1:
            return ((a[0] + b[0]) % P,)
        return tuple((x + y) % P for x, y in zip(a, b))

    def sub(self, a: Raw, b: Raw) -> Raw:
        P = self.modulus
        if self.f == 1:
            return ((a[0] - b[0]) % P,)
        return tuple((x - y) % P for x, y in zip(a, b))

    def neg(self, a: Raw) -> Raw:
        P = self.modulus
        return tuple((-x) % P for x in a)

    def scale(self, a: Raw, k: int) -> Raw:
        P = self.modulus
        return tuple((x * k) % P for x in a)

    def mul(self, a: Raw, b: Raw) -> Raw:
        if self.f == 1:
            return ((a[0] * b[0]) % self.modulus,)
        f = self.f
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self._reduce_poly(prod)

    def _reduce_poly(self, prod: list[int]) -> Raw:
        f, tail, P = self.f, self._tail, self.modulus
        prod = list(prod)
        for d in range(len(prod) - 1, f - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for i in range(f):
                    prod[d - f + i] += c * tail[i]
        return tuple(c % P for c in prod[:f]) + (0,) * max(0, f - len(prod))

    def pow(self, a: Raw, e: int) -> Raw:
        if e < 0:
            return self.pow(self.inverse(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def is_zero(self, a: Raw) -> bool:
        return not any(a)

    def is_unit(self, a: Raw) -> bool:
        p = self.p
        return any(c % p for c in a)

    def inverse(self, a: Raw) -> Raw:
        if not self.is_unit(a):
            raise NonUnitError(f"{a} is not a unit in {self!r}")
        q = self.params.q
        # the unit group has order (q - 1) q^(N - 1)
        return self.pow(a, (q - 1) * q ** (self.N - 1) - 1)

    def valuation(self, a: Raw) -> float:
        """p-adic valuation, capped at N; ``math.inf`` for zero."""
        if not any(a):
            return math.inf
        v, p = 0, self.p
        while all(c % p**(v + 1) == 0 for c in a):
            v += 1
        return v

    def divide_by_p_power(self, a: Raw, k: int) -> Raw:
        """Exact division by p^k; the top k digits of the result are zero-filled."""
        pk = self.p**k
        if any(c % pk for c in a):
            raise ArithmeticError(f"{a} is not divisible by p^{k}")
        return tuple(c // pk for c in a)

    def reduce_to(self, a: Raw, target: WittRing) -> Raw:
        if target.params.with_precision(1) != self.params.with_precision(1):
            raise ValueError("rings differ beyond precision")
        P = target.modulus
        return tuple(c % P for c in a)

    def eval_poly(self, coeffs: list[Raw], x: Raw) -> Raw:
        acc = self.zero
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    # Frobenius -----------------------------------------------------------

    @cached_property
    def sigma_u(self) -> Raw:
        """The root of m~ congruent to u^p mod p, Hensel-lifted to precision N."""
        if self.f == 1:
            return self.one
        m = [self.from_int(c) for c in self.params.m]
        dm = [self.from_int(i * c) for i, c in enumerate(self.params.m)][1:]
        u = self.normalize((0, 1))
        r = self.pow(u, self.p)
        for _ in range(math.ceil(math.log2(self.N)) + 1 if self.N > 1 else 1):
            r = self.sub(r, self.mul(self.eval_poly(m, r), self.inverse(self.eval_poly(dm, r))))
        assert self.is_zero(self.eval_poly(m, r)), "Hensel iteration did not converge"
        return r

    @cached_property
    def _sigma_powers(self) -> list[Raw]:
        out = [self.one]
        for _ in range(1, self.f):
            out.append(self.mul(out[-1], self.sigma_u))
        return out

    def frobenius(self, a: Raw) -> Raw:
        if self.f == 1:
            return a
        acc = [0] * self.f
        for c, su in zip(a, self._sigma_powers):
            if c:
                for i, s in enumerate(su):
                    acc[i] += c * s
        P = self.modulus
        return tuple(x % P for x in acc)


class WittElement:
    """An element of W_N(F_q) = (Z/p^N)[u]/(m~(u))."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WittRing, coeffs):
        self.ring = ring
        self.coeffs = ring.normalize(coeffs)

    @classmethod
    def _wrap(cls, ring, raw):
        obj = cls.__new__(cls)
        obj.ring, obj.coeffs = ring, raw
        return obj

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.from_int(other)
        if isinstance(other, WittElement):
            if other.ring is not self.ring:
                raise ParameterMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other.coeffs
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, self.ring.add(self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, self.ring.sub(self.coeffs, o))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._wrap(self.ring, self.ring.neg(self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ring, self.ring.mul(self.coeffs, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return self._wrap(self.ring, self.ring.pow(self.coeffs, e))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coeffs == self.ring.from_int(other)
        if isinstance(other, WittElement):
            return self.ring is other.ring and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.params, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"{type(self).__name__}({format_witt(self.coeffs)})"

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.coeffs)

    def inverse(self):
        return self._wrap(self.ring, self.ring.inverse(self.coeffs))

    def valuation(self):
        return self.ring.valuation(self.coeffs)

    def residue(self) -> FqElement:
        F = self.ring.params.residue_field
        return FqElement._wrap(F, self.ring.reduce_to(self.coeffs, F))

    def frobenius(self):
        return witt_frobenius(self)


class FqElement(WittElement):
    """An element of F_q = F_p[u]/(m(u))."""

    __slots__ = ()

    def __init__(self, ring: WittRing, coeffs):
        if ring.N != 1:
            raise ValidationError("FqElement requires a precision-1 ring")
        super().__init__(ring, coeffs)

    def lift(self, N: int) -> WittElement:
        """The lift with coefficient representatives in {0, ..., p-1}."""
        return WittElement(self.ring.at_precision(N), self.coeffs)


def format_witt(raw: Raw) -> str:
    """Render as a polynomial in u with decimal integer coefficients."""
    terms = []
    for i, c in enumerate(raw):
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{c}*u")
        else:
            terms.append(f"{c}*u^{i}")
    return " + ".join(terms) if terms else "0"


def teichmuller_lift(a: FqElement, N: int) -> WittElement:
    """The multiplicative lift ω(a) of a to W_N(F_q).

    Iterates w -> w^q from the canonical lift; N steps always suffice.
    """
    ring = a.ring.at_precision(N)
    q = ring.params.q
    w = a.coeffs
    for _ in range(N):
        w = ring.pow(w, q)
    assert ring.pow(w, q) == w
    return WittElement._wrap(ring, w)


def witt_frobenius(a: WittElement) -> WittElement:
    return type(a)._wrap(a.ring, a.ring.frobenius(a.coeffs))


# Witt-coordinate oracle ------------------------------------------------


@dataclass(frozen=True)
class WittCoords:
    """Witt-vector coordinates (a_0, ..., a_{N-1}) over F_q."""

    params: PrimeParams
    coords: tuple[FqElement, ...]

    def __post_init__(self):
        if len(self.coords) != self.params.N:
            raise ValidationError(f"expected {self.params.N} coordinates, got {len(self.coords)}")


def _frobenius_root(a: Raw, field: WittRing, i: int) -> Raw:
    # a^(p^-i) in F_q equals a^(p^((f - i) mod f))
    return field.pow(a, field.p ** ((-i) % field.f))


def teichmuller_expansion(x: WittElement) -> WittCoords:
    """Coordinates a_i with x = sum_i p^i ω(a_i^(p^-i))."""
    ring = x.ring
    field = ring.params.residue_field
    params = ring.params
    coords = []
    cur = x.coeffs
    for i in range(ring.N):
        digit = ring.reduce_to(cur, field)
        coords.append(FqElement._wrap(field, field.pow(digit, ring.p**i)))
        if i + 1 < ring.N:
            omega = teichmuller_lift(FqElement._wrap(field, digit), ring.N).coeffs
            cur = ring.divide_by_p_power(ring.sub(cur, omega), 1)
    return WittCoords(params, tuple(coords))


def assemble(c: WittCoords) -> WittElement:
    """Inverse of :func:`teichmuller_expansion`."""
    ring = c.params.witt
    field = c.params.residue_field
    acc = ring.zero
    for i, a in enumerate(c.coords):
        root = FqElement._wrap(field, _frobenius_root(a.coeffs, field, i))
        acc = ring.add(acc, ring.scale(teichmuller_lift(root, ring.N).coeffs, ring.p**i))
    return WittElement._wrap(ring, acc)


@lru_cache(maxsize=None)
def witt_polynomials(p: int, N: int):
    """Universal Witt sum and product polynomials S_0..S_{N-1}, P_0..P_{N-1}.

    Obtained by inverting the ghost map w_n = sum_{i<=n} p^i a_i^(p^(n-i))
    over Z.  Each polynomial is returned as a dict from exponent tuples in
    (a_0, ..., a_{N-1}, b_0, ..., b_{N-1}) to integer coefficients.
    """
    import sympy

    if N > MAX_ORACLE_PRECISION:
        raise UnsupportedPrecisionError(f"Witt oracle supports N <= {MAX_ORACLE_PRECISION}, got {N}")
    a = sympy.symbols(f"a0:{N}")
    b = sympy.symbols(f"b0:{N}")
    gens = a + b

    def poly(expr):
        return sympy.Poly(expr, *gens, domain=sympy.ZZ)

    def ghost(xs, n):
        return sum((p**i * xs[i] ** (p ** (n - i)) for i in range(n + 1)), poly(0))

    A = [poly(x) for x in a]
    B = [poly(x) for x in b]
    out = {}
    for name, combine in (("add", lambda u, v: u + v), ("mul", lambda u, v: u * v)):
        polys = []
        for n in range(N):
            rest = sum((p**i * polys[i] ** (p ** (n - i)) for i in range(n)), poly(0))
            polys.append((combine(ghost(A, n), ghost(B, n)) - rest).exquo_ground(p**n))
        out[name] = tuple({m: int(c) for m, c in P.terms()} for P in polys)
    return out


def witt_oracle(op: str, x: WittCoords, y: WittCoords) -> WittCoords:
    """Add or multiply Witt vectors coordinate-wise via the universal polynomials."""
    if op not in ("add", "mul"):
        raise ValueError(f"unknown op {op!r}")
    params = x.params
    if y.params != params:
        raise ParameterMismatchError("oracle operands over different rings")
    polys = witt_polynomials(params.p, params.N)[op]
    field = params.residue_field
    values = [c.coeffs for c in x.coords] + [c.coeffs for c in y.coords]
    powers: dict[tuple[int, int], Raw] = {}

    def power(var, e):
        key = (var, e)
        if key not in powers:
            powers[key] = field.pow(values[var], e)
        return powers[key]

    result = []
    for P in polys:
        acc = field.zero
        for mono, c in P.items():
            if c % params.p == 0:
                continue
            term = field.from_int(c)
            for var, e in enumerate(mono):
                if e:
                    term = field.mul(term, power(var, e))
            acc = field.add(acc, term)
        result.append(FqElement._wrap(field, acc))
    return WittCoords(params, tuple(result))
