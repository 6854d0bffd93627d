"""Randomized invariant suites for each module, driven by a seeded RNG.

Every suite returns a list of :class:`CheckResult`.  ``verify`` in the CLI
runs them all; the test-suite reuses the generators below.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .bkring import TCMinusElement, TPElement, degree, frobenius_phi, normalize, tc_to_tp
from .coeff import (
    PrimeParams,
    WittElement,
    assemble,
    teichmuller_expansion,
    witt_frobenius,
    witt_oracle,
)
from .errors import IntegralityError, ZOverflowError
from .fgl import (
    FormalGroupLaw,
    base_change_fgl,
    check_axioms,
    fgl_from_log,
    frobenius_map,
    honda_log,
    n_series,
)
from .localfield import LocalFieldData, OLElement, eisenstein_mod_p, evaluate_eisenstein, residue
from .orientation import Precision, precision_policy, run_theorem, s_ring
from .series import BaseRing, BaseSeries, BiSeries, ValuedSeries, XSeries, base_frobenius_sub, compose, revert

DEFAULT_SEED = 20240917
WITT_GRID = [(p, f, N) for p in (2, 3, 5) for f in (1, 2) for N in (1, 2, 3)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


# generators -------------------------------------------------------------------


def random_witt(rng: random.Random, params: PrimeParams, unit: bool = False) -> WittElement:
    W = params.witt
    P = W.modulus
    while True:
        raw = tuple(rng.randrange(P) for _ in range(params.f))
        if not unit or W.is_unit(raw):
            return WittElement(W, raw)


def random_base_series(rng: random.Random, ring: BaseRing, max_deg: int, density: float = 0.6) -> BaseSeries:
    P = ring.witt.modulus
    f = ring.params.f
    terms = {k: tuple(rng.randrange(P) for _ in range(f)) for k in range(max_deg + 1) if rng.random() < density}
    return BaseSeries(ring, terms)


def random_xseries(rng: random.Random, ring: BaseRing, D: int, zdeg: int, start: int = 1) -> XSeries:
    return XSeries(ring, D, {i: random_base_series(rng, ring, zdeg) for i in range(start, D + 1)})


def random_invertible_xseries(rng: random.Random, ring: BaseRing, D: int, zdeg: int) -> XSeries:
    """Random series with zero constant term and unit linear coefficient."""
    c1 = random_base_series(rng, ring, zdeg) * BaseSeries.z(ring) + random_witt(rng, ring.params, unit=True)
    return random_xseries(rng, ring, D, zdeg, start=2) + XSeries(ring, D, {1: c1})


def random_homogeneous_tc(rng: random.Random, L: LocalFieldData, ring: BaseRing, zdeg: int, span: int = 2):
    """s·x^k, s or s·t^k for a random degree 2k with |k| <= span."""
    k = rng.randint(-span, span)
    s = random_base_series(rng, ring, zdeg)
    mono = (k, 0) if k >= 0 else (0, -k)
    return TCMinusElement(L, ring, {mono: s})


# coeff ------------------------------------------------------------------------


def coeff_checks(rng: random.Random, pairs: int = 100, oracle_pairs: int = 50, grid=None) -> list[CheckResult]:
    out = []
    for p, f, N in grid or WITT_GRID:
        params = PrimeParams(p, N, f)
        tag = f"p={p} f={f} N={N}"
        ring_ok = hom_ok = round_ok = oracle_ok = True
        detail = ""
        for _ in range(max(10, pairs // 10)):
            a, b, c = (random_witt(rng, params) for _ in range(3))
            if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or a + b != b + a:
                ring_ok, detail = False, f"{a}, {b}, {c}"
                break
        for _ in range(pairs):
            a, b = random_witt(rng, params), random_witt(rng, params)
            if witt_frobenius(a + b) != witt_frobenius(a) + witt_frobenius(b) or witt_frobenius(
                a * b
            ) != witt_frobenius(a) * witt_frobenius(b):
                hom_ok, detail = False, f"{a}, {b}"
                break
        for _ in range(oracle_pairs):
            a, b = random_witt(rng, params), random_witt(rng, params)
            ca, cb = teichmuller_expansion(a), teichmuller_expansion(b)
            if assemble(ca) != a:
                round_ok, detail = False, f"{a}"
                break
            if assemble(witt_oracle("add", ca, cb)) != a + b or assemble(witt_oracle("mul", ca, cb)) != a * b:
                oracle_ok, detail = False, f"{a}, {b}"
                break
        out += [
            CheckResult(f"coeff {tag}: ring axioms", ring_ok, detail if not ring_ok else ""),
            CheckResult(f"coeff {tag}: sigma is a ring hom", hom_ok, detail if not hom_ok else ""),
            CheckResult(f"coeff {tag}: Teichmuller round trip", round_ok, detail if not round_ok else ""),
            CheckResult(f"coeff {tag}: Witt-coordinate oracle agrees", oracle_ok, detail if not oracle_ok else ""),
        ]
    return out


# series -----------------------------------------------------------------------


def series_checks(rng: random.Random, trials: int = 10) -> list[CheckResult]:
    out = []
    for p, f in ((2, 1), (3, 2), (5, 1)):
        params = PrimeParams(p, 3, f)
        ring = BaseRing.truncated(params, 6)
        wide = BaseRing.truncated(params, 6 * p)
        D = 7
        tag = f"p={p} f={f}"
        hom = rev = frob = vround = True
        for _ in range(trials):
            a = random_xseries(rng, ring, D, 3, start=0)
            b = random_xseries(rng, ring, D, 3, start=0)
            h = random_xseries(rng, ring, D, 3)
            hom &= compose(a * b, h) == compose(a, h) * compose(b, h)
            g = random_invertible_xseries(rng, ring, D, 2)
            r = revert(g)
            X = XSeries.variable(ring, D)
            rev &= compose(g, r) == X and compose(r, g) == X
            s, s2 = random_base_series(rng, wide, 3), random_base_series(rng, wide, 3)
            frob &= base_frobenius_sub(s * s2) == base_frobenius_sub(s) * base_frobenius_sub(s2)
            k = rng.randint(0, 2)
            vround &= ValuedSeries(a, k).to_series() == a.scalar_mul(p**k)
            vround &= ValuedSeries(a.scalar_mul(p**k), -k).to_series() == a.at_precision(params.N - k)
        out += [
            CheckResult(f"series {tag}: substitution is a ring hom", bool(hom)),
            CheckResult(f"series {tag}: revert is a two-sided compositional inverse", bool(rev)),
            CheckResult(f"series {tag}: base Frobenius is multiplicative", bool(frob)),
            CheckResult(f"series {tag}: ValuedSeries round trip at v >= 0", bool(vround)),
        ]
    return out


# localfield -------------------------------------------------------------------


def _random_ol(rng: random.Random, L: LocalFieldData) -> OLElement:
    return L.element([random_witt(rng, L.params) for _ in range(L.e)])


def localfield_checks(L: LocalFieldData, rng: random.Random, trials: int = 30) -> list[CheckResult]:
    ring_ok = res_ok = True
    for _ in range(trials):
        a, b, c = (_random_ol(rng, L) for _ in range(3))
        ring_ok &= (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c and a * b == b * a and a + b == b + a
        res_ok &= residue(a + b) == residue(a) + residue(b) and residue(a * b) == residue(a) * residue(b)
    field = L.params.with_precision(1)
    surjective = True
    for k in range(field.q):
        digits = [(k // field.p**i) % field.p for i in range(field.f)]
        c = field.fq(digits)
        surjective &= residue(L.element([c.lift(L.params.N)])) == c
    pi = L.uniformizer
    return [
        CheckResult("localfield: O_L is a commutative ring", bool(ring_ok)),
        CheckResult("localfield: residue is a ring hom", bool(res_ok)),
        CheckResult("localfield: residue is surjective", bool(surjective)),
        CheckResult("localfield: residue(uniformizer) = 0", not residue(pi)),
        CheckResult("localfield: E_L(uniformizer) = 0", not evaluate_eisenstein(L, pi)),
        CheckResult(
            "localfield: E_L mod p = z^e",
            eisenstein_mod_p(L) == BaseSeries.z(BaseRing.truncated(field, L.e), L.e),
        ),
    ]


# fgl --------------------------------------------------------------------------


def fgl_checks(L: LocalFieldData, rng: random.Random, D: int | None = None) -> list[CheckResult]:
    """Invariants of the integral Honda law with v = c·z^e, c a random unit."""
    prec = precision_policy(L.p, L.e, D)
    ring = s_ring(L, prec)
    p, D = L.p, prec.D
    v = BaseSeries(ring, {L.e: random_witt(rng, ring.params, unit=True)})
    out = []
    try:
        flog = honda_log(v, D)
        law = fgl_from_log(flog, D)
    except IntegralityError as exc:
        return [CheckResult("fgl: Honda law is integral", False, str(exc))]
    out.append(CheckResult("fgl: Honda law is integral", True))
    cert = check_axioms(law)
    out.append(CheckResult("fgl: Honda law satisfies the axioms", cert.passed, str(cert)))

    ok = True
    for _ in range(3):
        m, n = rng.randint(0, 5), rng.randint(0, 5)
        ok &= n_series(law, m + n) == law(n_series(law, m), n_series(law, n))
    out.append(CheckResult("fgl: [m+n] = F([m], [n])", bool(ok)))

    lowered = law.ring
    ps = n_series(law, p).at_precision(1).truncate(p)
    want = XSeries(lowered.at_precision(1), D, {p: v.at_precision(1)})
    out.append(CheckResult("fgl: [p](X) = v X^p mod (p, X^(p+1))", ps == want, str(ps)))

    try:
        pushed = base_change_fgl(law, frobenius_map(lowered))
        twisted = fgl_from_log(honda_log(base_frobenius_sub(v), D), D)
        out.append(CheckResult("fgl: Frobenius push-forward = Honda law at sigma_*(v)", pushed == twisted))
    except ZOverflowError as exc:
        out.append(CheckResult("fgl: Frobenius push-forward = Honda law at sigma_*(v)", False, str(exc)))

    # g = p^k f has integral coefficients; compare g([n]) with n g mod p^(N-k)
    k = -flog.shift
    body = flog.body
    Nk = lowered.params.N
    lin = True
    for n in range(1, 6):
        nx = n_series(law, n).at_precision(ring.params.N)
        lin &= body.substitute(nx).at_precision(Nk) == body.scalar_mul(n).at_precision(Nk)
    out.append(CheckResult(f"fgl: log linearizes [n], n <= 5 (p^{k} f integral)", bool(lin)))
    return out


# bkring -----------------------------------------------------------------------


def random_raw_product(rng: random.Random, L: LocalFieldData, ring: BaseRing) -> dict:
    """An unnormalized sum of products of at most six generators x, t, c·z^i."""
    terms: dict = {}
    for _ in range(rng.randint(1, 3)):
        a = b = 0
        coeff = BaseSeries(ring, {0: random_witt(rng, L.params, unit=True)})
        for _ in range(rng.randint(1, 6)):
            g = rng.choice("xtz")
            if g == "x":
                a += 1
            elif g == "t":
                b += 1
            else:
                coeff = coeff * BaseSeries.z(ring, rng.randint(0, 1))
        terms[(a, b)] = terms[(a, b)] + coeff if (a, b) in terms else coeff
    return terms


def _is_normal_in_degree(el: TCMinusElement) -> bool:
    for a, b in el.terms:
        if a and b:
            return False
    d = degree(el)
    if d is None:
        return not el or len({2 * a - 2 * b for a, b in el.terms}) > 1
    want = (d // 2, 0) if d >= 0 else (0, -d // 2)
    return set(el.terms) == {want}


def bkring_checks(L: LocalFieldData, rng: random.Random, pairs: int = 100) -> list[CheckResult]:
    p, e = L.p, L.e
    zdeg = 2
    ring = BaseRing.truncated(L.params, p * (2 * zdeg + 4 * e))
    E = L.eisenstein_in(ring)
    out = []

    confluent = normal = True
    for _ in range(20):
        raw = random_raw_product(rng, L, ring)
        ref = normalize(L, ring, raw)
        confluent &= all(normalize(L, ring, raw, rng) == ref for _ in range(3))
        confluent &= TCMinusElement(L, ring, raw) == ref
        normal &= all(not (a and b) for a, b in ref.terms)
    out.append(CheckResult("bkring: rewriting is confluent", bool(confluent)))

    phi_hom = loc_hom = graded = True
    detail = ""
    for _ in range(pairs):
        a = random_homogeneous_tc(rng, L, ring, zdeg)
        b = random_homogeneous_tc(rng, L, ring, zdeg)
        ab = a * b
        normal &= _is_normal_in_degree(ab) and _is_normal_in_degree(a + b)
        if frobenius_phi(ab) != frobenius_phi(a) * frobenius_phi(b) or frobenius_phi(a + b) != frobenius_phi(
            a
        ) + frobenius_phi(b):
            phi_hom, detail = False, f"{a!r}, {b!r}"
        loc_hom &= tc_to_tp(ab) == tc_to_tp(a) * tc_to_tp(b) and tc_to_tp(a + b) == tc_to_tp(a) + tc_to_tp(b)
        for el in (a, b, ab):
            if el:
                graded &= degree(frobenius_phi(el)) == degree(el) == degree(tc_to_tp(el))
    out += [
        CheckResult(f"bkring: phi is a ring hom ({pairs} random homogeneous pairs)", bool(phi_hom), detail),
        CheckResult(f"bkring: localization is a ring hom ({pairs} random homogeneous pairs)", bool(loc_hom)),
        CheckResult("bkring: phi and localization preserve degree", bool(graded)),
        CheckResult("bkring: normal monomials are x^(d/2), 1, t^(-d/2)", bool(normal)),
    ]
    x, t = TCMinusElement.x(L, ring), TCMinusElement.t(L, ring)
    phiE = TPElement.scalar(L, ring, base_frobenius_sub(E))
    out.append(CheckResult("bkring: phi(t x) = phi(E_L)", frobenius_phi(t * x) == phiE))
    out.append(CheckResult("bkring: phi(t)·phi(x) = phi(E_L)", frobenius_phi(t) * frobenius_phi(x) == phiE))
    zp = TPElement.scalar(L, ring, BaseSeries.z(ring, p))
    out.append(CheckResult("bkring: phi(z) = z^p", frobenius_phi(TCMinusElement.scalar(L, ring, BaseSeries.z(ring))) == zp))
    out.append(CheckResult("bkring: phi(x) = t^-1", frobenius_phi(x) == TPElement.t(L, ring, -1)))
    return out


# driver -----------------------------------------------------------------------


@dataclass
class FieldRun:
    label: str
    field: LocalFieldData
    report: object  # TheoremReport, or None if construction raised
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def corrupt_law(law: FormalGroupLaw) -> FormalGroupLaw:
    """Add z·X^2Y to F: a deliberately broken fixture for harness self-tests."""
    bump = BiSeries.monomial(law.ring, law.D, (2, 1), BaseSeries.z(law.ring))
    return FormalGroupLaw(law.F + bump, law.descriptor + " (corrupted)")


def run_field(
    L: LocalFieldData,
    label: str = "",
    seed: int = DEFAULT_SEED,
    D: int | None = None,
    corrupt: bool = False,
    prec: Precision | None = None,
) -> FieldRun:
    """Theorem checks plus the local-field, fgl and bkring invariant suites for one field."""
    label = label or L.describe()
    prec = precision_policy(L.p, L.e, D) if prec is None else prec
    if L.params.N < prec.N:
        raise ValueError(f"field data must be given at p-adic precision >= {prec.N}")
    rng = random.Random(f"{seed}:{label}")
    try:
        report = run_theorem(L, prec=prec)
    except Exception as exc:
        return FieldRun(label, L, None, [CheckResult("theorem bundle", False, f"{type(exc).__name__}: {exc}")])
    checks = [CheckResult(name, ok, detail) for name, ok, detail in report.checks]
    if corrupt:
        cert = check_axioms(corrupt_law(report.F))
        checks.append(CheckResult("axioms for F (corrupted fixture)", cert.passed, str(cert)))
    for suite in (localfield_checks, fgl_checks, bkring_checks):
        try:
            checks += suite(L, rng) if suite is not fgl_checks else suite(L, rng, prec.D)
        except Exception as exc:
            checks.append(CheckResult(suite.__name__, False, f"{type(exc).__name__}: {exc}"))
    return FieldRun(label, L, report, checks)


def run_global(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """The field-independent suites (Witt arithmetic, series)."""
    rng = random.Random(seed)
    return coeff_checks(rng) + series_checks(rng)
