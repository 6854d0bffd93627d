"""Formal group laws at finite truncation.

Axiom certificates, n-series, mod-p height, the Honda (functional
equation) logarithm, the law attached to a logarithm, and base change
along a handful of registered coefficient-ring maps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    IntegralityError,
    HeightSanityError,
    ParameterMismatchError,
    PrecisionExhaustedError,
    WrongCharacteristicError,
    ZOverflowError,
)
from .localfield import LocalFieldData, specialize
from .series import (
    BaseRing,
    BaseSeries,
    BiSeries,
    TriSeries,
    ValuedSeries,
    XSeries,
    base_frobenius_sub,
)


@dataclass(frozen=True, eq=False)
class FormalGroupLaw:
    """F(X, Y) truncated at total degree D, optionally with its logarithm."""

    F: BiSeries
    descriptor: str = ""
    log: ValuedSeries | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.descriptor:
            object.__setattr__(self, "descriptor", self.F.ring.describe())

    @property
    def ring(self) -> BaseRing:
        return self.F.ring

    @property
    def D(self) -> int:
        return self.F.D

    def __call__(self, a, b):
        return self.F.substitute(a, b)

    def __eq__(self, other):
        if not isinstance(other, FormalGroupLaw):
            return NotImplemented
        return self.F == other.F

    __hash__ = None

    @classmethod
    def additive(cls, ring: BaseRing, D: int) -> FormalGroupLaw:
        X, Y = BiSeries.variable(ring, D, 0), BiSeries.variable(ring, D, 1)
        return cls(X + Y, log=ValuedSeries(XSeries.variable(ring, D)))

    @classmethod
    def multiplicative(cls, ring: BaseRing, D: int) -> FormalGroupLaw:
        X, Y = BiSeries.variable(ring, D, 0), BiSeries.variable(ring, D, 1)
        return cls(X + Y + X * Y)


@dataclass(frozen=True)
class AxiomCertificate:
    """Outcome of :func:`check_axioms`; falsy when an identity fails."""

    passed: bool
    identity: str | None = None
    monomial: tuple | None = None

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return "pass"
        return f"fail: {self.identity} at monomial {_monomial_str(self.monomial)}"


def _monomial_str(mono) -> str:
    names = "XYZ"
    parts = [f"{n}^{e}" if e > 1 else n for n, e in zip(names, mono) if e]
    return "*".join(parts) or "1"


def check_axioms(law: FormalGroupLaw) -> AxiomCertificate:
    """Unitality, commutativity and associativity to total degree D.

    Associativity is checked by expanding F(F(X,Y),Z) and F(X,F(Y,Z)) in
    three variables.
    """
    cmap = law.F.coefficient_map()
    one = BaseSeries.one(law.ring)
    for mono in sorted(cmap, key=lambda m: (sum(m), m[::-1])):
        c = cmap[mono]
        i, j = mono
        if j == 0 and c != (one if i == 1 else 0):
            return AxiomCertificate(False, "F(X,0) = X", (i, 0))
        if i == 0 and c != (one if j == 1 else 0):
            return AxiomCertificate(False, "F(0,Y) = Y", (0, j))
    for needed in ((1, 0), (0, 1)):
        if needed not in cmap and law.D >= 1:
            ident = "F(X,0) = X" if needed == (1, 0) else "F(0,Y) = Y"
            return AxiomCertificate(False, ident, needed)
    for (i, j), c in sorted(cmap.items()):
        if law.F.coefficient(j, i) != c:
            return AxiomCertificate(False, "F(X,Y) = F(Y,X)", (i, j))
    ring, D = law.ring, law.D
    X, Y, Z = (TriSeries.variable(ring, D, k) for k in range(3))
    lhs = law.F.substitute(law.F.embed(TriSeries, (0, 1)), Z)
    rhs = law.F.substitute(X, law.F.embed(TriSeries, (1, 2)))
    diff = lhs - rhs
    if diff:
        first = min(diff.coefficient_map(), key=lambda m: (sum(m), m[::-1]))
        return AxiomCertificate(False, "F(F(X,Y),Z) = F(X,F(Y,Z))", first)
    return AxiomCertificate(True)


def n_series(law: FormalGroupLaw, n: int) -> XSeries:
    """[n](X): [0] = 0 and [n](X) = F(X, [n-1](X))."""
    if n < 0:
        raise ValueError("n must be >= 0")
    X = XSeries.variable(law.ring, law.D)
    s = XSeries.zero(law.ring, law.D)
    for _ in range(n):
        s = law.F.substitute(X, s)
    return s


ADDITIVE_OR_UNDETERMINED = "additive/undetermined at truncation"


@dataclass(frozen=True)
class HeightReport:
    """Height n with leading coefficient a, or the additive/undetermined outcome.

    The latter means every coefficient of [p](X) vanishes up to degree D;
    finite truncation cannot tell [p] = 0 from a height beyond log_p D.
    """

    height: int | None
    leading: BaseSeries | None = None
    D: int = 0

    @property
    def additive_or_undetermined(self) -> bool:
        return self.height is None

    @property
    def status(self) -> str:
        return ADDITIVE_OR_UNDETERMINED if self.height is None else f"height {self.height}"


def _p_power_exponent(d: int, p: int) -> int | None:
    h = 0
    while d % p == 0:
        d //= p
        h += 1
    return h if d == 1 else None


def p_height_mod_p(law: FormalGroupLaw) -> HeightReport:
    """Height of a law over an F_p-algebra from the lowest term of [p](X)."""
    ring = law.ring
    if ring.params.N != 1:
        raise WrongCharacteristicError(
            f"p = {ring.params.p} is not zero in {ring.describe()}; reduce mod p first"
        )
    p = ring.params.p
    series = n_series(law, p)
    d = series.order()
    if d is math.inf:
        return HeightReport(None, None, law.D)
    h = _p_power_exponent(d, p)
    if h is None:
        raise HeightSanityError(f"[p](X) has lowest nonzero term at non-p-power degree {d}")
    return HeightReport(h, series.coefficient(d), law.D)


# Honda construction ---------------------------------------------------------


@dataclass(frozen=True)
class VData:
    """Height-one parameter v together with the base Frobenius twist."""

    v: BaseSeries

    def __post_init__(self):
        if not self.v:
            raise ValueError("v must be nonzero")

    def twist(self, s: BaseSeries) -> BaseSeries:
        return base_frobenius_sub(s)


def log_depth(p: int, D: int) -> int:
    """floor(log_p D), the largest i with p^i <= D."""
    k = 0
    while p ** (k + 1) <= D:
        k += 1
    return k


def honda_log(v: VData | BaseSeries, D: int) -> ValuedSeries:
    """f(X) = sum_i c_i X^(p^i) with c_0 = 1, c_(i+1) = v·σ_*(c_i)/p.

    Built by iterating f <- X + p^-1 · v · f^σ(X^p), truncated at degree D.
    """
    if isinstance(v, BaseSeries):
        v = VData(v)
    ring = v.v.ring
    p, N = ring.params.p, ring.params.N
    k = log_depth(p, D)
    if N <= k:
        raise PrecisionExhaustedError(f"Honda logarithm to degree {D} needs N > {k}, have N = {N}")
    need = v.v.degree() * (p**k - 1) // (p - 1)
    if ring.M < need:
        raise ZOverflowError(f"Honda logarithm to degree {D} needs M >= {need}, have M = {ring.M}")
    X = XSeries.variable(ring, D)
    Xp = X**p
    f = ValuedSeries(X)
    for _ in range(k):
        f = ValuedSeries(X) + (f.frobenius_twist().compose(Xp) * v.v).scale_by_p_inverse()
    return f


def fgl_from_log(f: ValuedSeries, D: int | None = None) -> FormalGroupLaw:
    """F = f^-1(f(X) + f(Y)), solved degree by degree.

    Works with the integral body g = p^k f, exact mod p^N.  Each pass fixes
    the degrees where the residual g(X) + g(Y) - g(F) must be p^k times the
    correction; a residual not divisible by p^k raises IntegralityError.
    The law is returned over W_(N-k).
    """
    ring = f.ring
    p, N = ring.params.p, ring.params.N
    D = f.D if D is None else D
    k = max(0, -f.shift)
    body = f.body if f.shift == -k else f.body.scalar_mul(p ** (f.shift + k))
    body = body.with_order(D)
    pk = p**k
    W = ring.witt
    if body.coefficient(1) != BaseSeries(ring, {0: pk}) or body.constant_term():
        raise ValueError("logarithm must have the form X + higher terms")
    X, Y = BiSeries.variable(ring, D, 0), BiSeries.variable(ring, D, 1)
    target = body.embed(BiSeries, (0,)) + body.embed(BiSeries, (1,))
    F = X + Y
    higher = [i for (i,) in body.coefficient_map() if i >= 2]
    width = min(higher) - 1 if higher else D
    n = 2
    while n <= D:
        hi = min(D, n + width - 1)
        residual = target.with_order(hi) - body.with_order(hi).substitute(F.with_order(hi))
        correction = {}
        for key, val in residual.terms.items():
            deg = key[0] + key[1]
            if deg < n:
                raise IntegralityError(f"residual survives in already-solved degree {deg}")
            try:
                correction[key] = W.divide_by_p_power(val, k)
            except ArithmeticError:
                raise IntegralityError(
                    f"coefficient of X^{key[0]}Y^{key[1]} (z^{key[2]}) has negative valuation"
                ) from None
        F = F + BiSeries._wrap(ring, D, correction)
        n = hi + 1
    return FormalGroupLaw(F.at_precision(N - k), log=f)


def honda_law(v: VData | BaseSeries, D: int) -> FormalGroupLaw:
    return fgl_from_log(honda_log(v, D), D)


# base change --------------------------------------------------------------


@dataclass(frozen=True)
class RingMap:
    """A coefficient-ring homomorphism between BaseRings."""

    name: str
    source: BaseRing
    target: BaseRing
    apply: Callable[[BaseSeries], BaseSeries] = field(repr=False)

    def __call__(self, s: BaseSeries) -> BaseSeries:
        if s.ring is not self.source:
            raise ParameterMismatchError(f"{self.name} expects {self.source.describe()}")
        return self.apply(s)


def frobenius_map(ring: BaseRing) -> RingMap:
    """σ on coefficients and z -> z^p."""
    return RingMap("frobenius", ring, ring, base_frobenius_sub)


def reduction_map(ring: BaseRing, N: int = 1) -> RingMap:
    """Reduction W_N -> W_N' (N' <= N); N' = 1 is reduction mod p."""
    if N > ring.params.N:
        raise ValueError("reduction cannot raise precision")
    target = ring.at_precision(N)
    return RingMap(f"mod p^{N}", ring, target, lambda s: s.at_precision(N))


def specialization_map(ring: BaseRing, L: LocalFieldData) -> RingMap:
    """z -> ϖ_L into O_L/p^N."""
    target = L.ol_ring(ring.params.N)
    return RingMap("specialize z -> uniformizer", ring, target, lambda s: specialize(s, L))


def residue_map(ring: BaseRing) -> RingMap:
    """z -> 0 into W_N(F_q)."""
    target = BaseRing.truncated(ring.params, 0)
    return RingMap("z -> 0", ring, target, lambda s: BaseSeries(target, {0: s[0]}))


def base_change_fgl(law: FormalGroupLaw, phi: RingMap) -> FormalGroupLaw:
    """Push a law forward along a registered coefficient map (log is not carried)."""
    if phi.source is not law.ring:
        raise ParameterMismatchError(f"{phi.name} is defined on {phi.source.describe()}, law on {law.descriptor}")
    return FormalGroupLaw(law.F.map_coefficients(phi, phi.target))
