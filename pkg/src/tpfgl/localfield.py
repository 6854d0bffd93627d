"""Local field data: Eisenstein polynomials and O_L = W(F_q)[z]/(E_L(z))."""
from __future__ import annotations

from dataclasses import dataclass

from .coeff import FqElement, PrimeParams, WittElement
from .errors import ParameterMismatchError, PrecisionError, ValidationError
from .series import BaseRing, BaseSeries, _to_raw, format_z_poly


class NotEisensteinError(ValidationError):
    pass


@dataclass(frozen=True)
class LocalFieldData:
    """(p, f, e_L, θ) describing O_L through E_L(z) = z^e + p·θ(z).

    ``theta`` holds raw coefficients of θ over W_N(F_q), constant term first.
    Build instances with :func:`validate_eisenstein`.
    """

    params: PrimeParams
    e: int
    theta: tuple

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def f(self) -> int:
        return self.params.f

    @property
    def eisenstein(self) -> list:
        """Raw coefficients of E_L(z), constant term first (length e + 1)."""
        W = self.params.witt
        coeffs = [W.scale(c, self.p) for c in self.theta]
        coeffs += [W.zero] * (self.e - len(coeffs))
        return coeffs + [W.one]

    def eisenstein_in(self, ring: BaseRing) -> BaseSeries:
        """E_L(z) as an element of a BaseRing over the same F_q."""
        if ring.params.with_precision(1) != self.params.with_precision(1):
            raise ParameterMismatchError("ring has a different residue field")
        return BaseSeries(ring, dict(enumerate(self.eisenstein)))

    def at_precision(self, N: int) -> LocalFieldData:
        """Same field data with θ reduced or lifted to precision N."""
        params = self.params.with_precision(N)
        W = params.witt
        return LocalFieldData(params, self.e, tuple(tuple(c % W.modulus for c in t) for t in self.theta))

    def ol_ring(self, N: int | None = None) -> BaseRing:
        """O_L / p^N presented as W_N(F_q)[z]/(E_L(z))."""
        L = self if N is None else self.at_precision(N)
        return BaseRing.quotient(L.params, L.eisenstein)

    def element(self, coeffs) -> OLElement:
        return OLElement(self, BaseSeries(self.ol_ring(), coeffs))

    @property
    def uniformizer(self) -> OLElement:
        return OLElement(self, BaseSeries(self.ol_ring(), {1: 1}))

    def describe(self) -> str:
        terms = {k: c for k, c in enumerate(self.eisenstein) if any(c)}
        return f"p={self.p} f={self.f} e={self.e} E(z)={format_z_poly(terms)}"

    def theta_ints(self) -> list[list[int]]:
        """θ coefficients as signed integer lists (symmetric residues), for echoing."""
        P = self.params.witt.modulus
        return [[c - P if c > P // 2 else c for c in t] for t in self.theta]


def validate_eisenstein(params: PrimeParams, e: int, theta) -> LocalFieldData:
    """Check deg θ < e and θ(0) a unit, so that z^e + pθ(z) is Eisenstein."""
    if e < 1:
        raise ValidationError(f"ramification index must be >= 1, got {e}")
    W = params.witt
    raw = [_to_raw(W, c) for c in theta]
    while raw and not any(raw[-1]):
        raw.pop()
    if len(raw) > e:
        raise ValidationError(f"deg θ = {len(raw) - 1} must be < e = {e}")
    if not raw or not W.is_unit(raw[0]):
        raise NotEisensteinError("θ(0) is not a unit: constant term of E_L is divisible by p^2")
    return LocalFieldData(params, e, tuple(raw))


class OLElement:
    """An element of O_L/p^N = W_N(F_q)[z]/(E_L(z)) in reduced form (z-degree < e)."""

    __slots__ = ("field", "value")

    def __init__(self, field: LocalFieldData, value: BaseSeries):
        self.field = field
        self.value = value

    def _other(self, other):
        if isinstance(other, OLElement):
            if other.field != self.field:
                raise ParameterMismatchError("elements of different local fields")
            return other.value
        return other

    def __add__(self, other):
        return OLElement(self.field, self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return OLElement(self.field, self.value - self._other(other))

    def __neg__(self):
        return OLElement(self.field, -self.value)

    def __mul__(self, other):
        return OLElement(self.field, self.value * self._other(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return OLElement(self.field, self.value**k)

    def __eq__(self, other):
        if isinstance(other, (OLElement, int, WittElement)):
            return self.value == self._other(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"OLElement({self.value})"

    def coefficients(self) -> list[WittElement]:
        return [self.value[k] for k in range(self.field.e)]

    def residue(self) -> FqElement:
        return residue(self)


def ol_arith(op: str, a: OLElement, b: OLElement) -> OLElement:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def residue(a: OLElement) -> FqElement:
    """O_L -> F_q: send z to 0, then reduce mod p."""
    return a.value[0].residue()


def evaluate_eisenstein(L: LocalFieldData, x: OLElement) -> OLElement:
    """E_L(x) computed in O_L."""
    ring = L.ol_ring()
    acc = OLElement(L, BaseSeries(ring))
    for c in reversed(L.eisenstein):
        acc = acc * x + OLElement(L, BaseSeries(ring, {0: c}))
    return acc


def eisenstein_mod_p(L: LocalFieldData, M: int | None = None) -> BaseSeries:
    """E_L(z) reduced mod p, as a series over F_q[[z]] truncated at z^M (default M = e)."""
    ring = BaseRing.truncated(L.params.with_precision(1), L.e if M is None else M)
    return L.eisenstein_in(ring)


def specialize(s: BaseSeries, L: LocalFieldData) -> BaseSeries:
    """z -> ϖ_L from W_N(F_q)[[z]]/(z^(M+1)) into O_L/p^N.

    Well defined only when ϖ^(M+1) vanishes mod p^N, i.e. M + 1 >= e·N.
    """
    ring = s.ring
    if not ring.is_truncated:
        raise ValueError("specialization starts from a truncated z-series ring")
    N = ring.params.N
    if ring.M + 1 < L.e * N:
        raise PrecisionError(
            f"z^{ring.M + 1} does not vanish in O_L/p^{N}; need M + 1 >= e·N = {L.e * N}"
        )
    if ring.params.with_precision(1) != L.params.with_precision(1):
        raise ParameterMismatchError("series and local field have different residue fields")
    target = L.ol_ring(N)
    return BaseSeries(target, dict(s.terms))
