"""The graded rings S[x, t]/(tx - E_L(z)) and S[t, t^-1] over S = W(F_q)[[z]].

Degrees: |x| = 2, |t| = -2, |z| = 0.  Elements are finite S-linear
combinations of normalized monomials; the Frobenius φ and the localization
map both land in the Laurent ring.
"""
from __future__ import annotations

import random

from .errors import ParameterMismatchError
from .localfield import LocalFieldData
from .series import BaseRing, BaseSeries, base_frobenius_sub


class _GradedElement:
    __slots__ = ("field", "ring", "terms")

    def __init__(self, field: LocalFieldData, ring: BaseRing, terms=None):
        self.field = field
        self.ring = ring
        self.terms = {}
        for mono, c in (terms or {}).items():
            if not isinstance(c, BaseSeries):
                c = BaseSeries(ring, c)
            elif c.ring is not ring:
                raise ParameterMismatchError(f"{c.ring!r} vs {ring!r}")
            if c:
                self._accumulate(self.terms, mono, c)

    def _accumulate(self, terms, mono, c):
        cur = terms.get(mono)
        c = c if cur is None else cur + c
        if c:
            terms[mono] = c
        else:
            terms.pop(mono, None)

    def _like(self, terms):
        obj = type(self).__new__(type(self))
        obj.field, obj.ring, obj.terms = self.field, self.ring, terms
        return obj

    def _check(self, other):
        if type(other) is not type(self):
            raise ParameterMismatchError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ring is not self.ring or other.field != self.field:
            raise ParameterMismatchError("elements over different local fields or precisions")

    def _lift(self, other):
        if isinstance(other, (int, BaseSeries)):
            return self.scalar(self.field, self.ring, other)
        return other

    def __add__(self, other):
        other = self._lift(other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            self._accumulate(out, m, c)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __eq__(self, other):
        if isinstance(other, (int, BaseSeries)):
            other = self._lift(other)
        if type(other) is not type(self):
            return NotImplemented
        return other.ring is self.ring and other.field == self.field and other.terms == self.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, mono) -> BaseSeries:
        return self.terms.get(mono, BaseSeries(self.ring))

    def at_precision(self, N: int):
        """Reduce coefficients to W_N (N = 1 is reduction mod p)."""
        obj = type(self).__new__(type(self))
        obj.field, obj.ring = self.field.at_precision(N), self.ring.at_precision(N)
        obj.terms = {}
        for m, c in self.terms.items():
            c = c.at_precision(N)
            if c:
                obj.terms[m] = c
        return obj

    @classmethod
    def scalar(cls, field, ring, c):
        raise NotImplementedError


class TCMinusElement(_GradedElement):
    """Element of S[x, t]/(tx - E_L(z)), keyed by normalized (a, b) for x^a t^b."""

    __slots__ = ()

    def __init__(self, field: LocalFieldData, ring: BaseRing, terms=None):
        super().__init__(field, ring)
        for (a, b), c in (terms or {}).items():
            c = c if isinstance(c, BaseSeries) else BaseSeries(ring, c)
            if c.ring is not ring:
                raise ParameterMismatchError(f"{c.ring!r} vs {ring!r}")
            k = min(a, b)
            if k:
                c = c * _eisenstein(field, ring) ** k
            if c:
                self._accumulate(self.terms, (a - k, b - k), c)

    @classmethod
    def scalar(cls, field, ring, c):
        c = c if isinstance(c, BaseSeries) else BaseSeries(ring, c)
        return cls(field, ring, {(0, 0): c})

    @classmethod
    def x(cls, field, ring):
        return cls(field, ring, {(1, 0): 1})

    @classmethod
    def t(cls, field, ring):
        return cls(field, ring, {(0, 1): 1})

    def __mul__(self, other):
        return tc_multiply(self, self._lift(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.scalar(self.field, self.ring, 1)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            mono = "*".join(s for s in (_pw("x", a), _pw("t", b)) if s)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return "TCMinusElement(" + (" + ".join(parts) or "0") + ")"


class TPElement(_GradedElement):
    """Element of S[t, t^-1], keyed by the integer power of t."""

    __slots__ = ()

    @classmethod
    def scalar(cls, field, ring, c):
        c = c if isinstance(c, BaseSeries) else BaseSeries(ring, c)
        return cls(field, ring, {0: c})

    @classmethod
    def t(cls, field, ring, power: int = 1):
        return cls(field, ring, {power: 1})

    def __mul__(self, other):
        return tp_multiply(self, self._lift(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ArithmeticError("only monomials with unit coefficient are invertible here")
            (b, c), = self.terms.items()
            return TPElement(self.field, self.ring, {-b: c.inverse()}) ** (-n)
        result = self.scalar(self.field, self.ring, 1)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        parts = [f"({c})*t^{b}" if b else f"({c})" for b, c in sorted(self.terms.items())]
        return "TPElement(" + (" + ".join(parts) or "0") + ")"


def _pw(name, k):
    return "" if k == 0 else name if k == 1 else f"{name}^{k}"


def _eisenstein(field: LocalFieldData, ring: BaseRing) -> BaseSeries:
    return field.eisenstein_in(ring)


def rewrite_step(field: LocalFieldData, ring: BaseRing, terms: dict, choose=None) -> dict | None:
    """Apply one rewrite x^a t^b -> E_L(z) x^(a-1) t^(b-1) to a raw term map.

    ``terms`` maps (a, b) to BaseSeries and may be unnormalized.  Returns the
    rewritten map, or None when already normal.  ``choose`` picks the redex.
    """
    redexes = [m for m in terms if m[0] > 0 and m[1] > 0]
    if not redexes:
        return None
    a, b = (choose or min)(redexes)
    out = dict(terms)
    c = out.pop((a, b))
    new = (a - 1, b - 1)
    c = c * _eisenstein(field, ring)
    cur = out.get(new)
    c = c if cur is None else cur + c
    if c:
        out[new] = c
    else:
        out.pop(new, None)
    return out


def normalize(field: LocalFieldData, ring: BaseRing, terms: dict, rng: random.Random | None = None) -> TCMinusElement:
    """Exhaustively rewrite; with ``rng`` the redex order is random."""
    choose = (lambda rs: rng.choice(sorted(rs))) if rng else None
    cur = dict(terms)
    while True:
        nxt = rewrite_step(field, ring, cur, choose)
        if nxt is None:
            break
        cur = nxt
    el = TCMinusElement.__new__(TCMinusElement)
    el.field, el.ring, el.terms = field, ring, {m: c for m, c in cur.items() if c}
    return el


def tc_multiply(a: TCMinusElement, b: TCMinusElement) -> TCMinusElement:
    """Product in S[x, t]/(tx - E_L(z)), normalized."""
    a._check(b)
    out = TCMinusElement.__new__(TCMinusElement)
    out.field, out.ring, out.terms = a.field, a.ring, {}
    E = _eisenstein(a.field, a.ring)
    Epow = {0: BaseSeries.one(a.ring)}
    for (a1, b1), c1 in a.terms.items():
        for (a2, b2), c2 in b.terms.items():
            x, t = a1 + a2, b1 + b2
            k = min(x, t)
            if k not in Epow:
                Epow[k] = E**k
            c = c1 * c2 * Epow[k]
            if c:
                out._accumulate(out.terms, (x - k, t - k), c)
    return out


def tp_multiply(a: TPElement, b: TPElement) -> TPElement:
    """Laurent-polynomial product over S."""
    a._check(b)
    out = TPElement.__new__(TPElement)
    out.field, out.ring, out.terms = a.field, a.ring, {}
    for b1, c1 in a.terms.items():
        for b2, c2 in b.terms.items():
            c = c1 * c2
            if c:
                out._accumulate(out.terms, b1 + b2, c)
    return out


def tc_to_tp(a: TCMinusElement) -> TPElement:
    """The localization map: t -> t, z -> z, x -> E_L(z) t^-1."""
    E = _eisenstein(a.field, a.ring)
    out = TPElement(a.field, a.ring)
    for (x, t), c in a.terms.items():
        out = out + TPElement(a.field, a.ring, {t - x: c * E**x})
    return out


def frobenius_phi(a: TCMinusElement) -> TPElement:
    """φ: coefficients by σ with z -> z^p, x -> t^-1, t -> φ(E_L(z))·t.

    Raises ZOverflowError when z -> z^p exceeds the z-truncation.
    """
    phiE = base_frobenius_sub(_eisenstein(a.field, a.ring))
    out = TPElement(a.field, a.ring)
    for (x, t), c in a.terms.items():
        coeff = base_frobenius_sub(c)
        if t:
            coeff = coeff * phiE**t
        out = out + TPElement(a.field, a.ring, {t - x: coeff})
    return out


def degree(a: TCMinusElement | TPElement) -> int | None:
    """Internal degree (|x| = 2, |t| = -2), or None if inhomogeneous or zero."""
    if isinstance(a, TCMinusElement):
        degs = {2 * x - 2 * t for (x, t) in a.terms}
    else:
        degs = {-2 * b for b in a.terms}
    return degs.pop() if len(degs) == 1 else None
