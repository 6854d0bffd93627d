"""The theorem bundle: orientation images of x_(p-1) and the mod-p laws F, G.

F lives on TC^-/p and is the Honda law with v = z^e; G lives on TP/p and
is F pushed along the base Frobenius.  Both should have height one, with
[p]-series leading terms z^e X^p and z^(pe) X^p respectively.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bkring import TCMinusElement, TPElement, degree, frobenius_phi, tc_to_tp
from .coeff import PrimeParams
from .errors import CheckFailedError
from .fgl import (
    FormalGroupLaw,
    HeightReport,
    base_change_fgl,
    check_axioms,
    frobenius_map,
    honda_law,
    log_depth,
    n_series,
    p_height_mod_p,
    reduction_map,
    specialization_map,
)
from .localfield import (
    LocalFieldData,
    eisenstein_mod_p,
    evaluate_eisenstein,
    specialize,
    validate_eisenstein,
)
from .series import BaseRing, BaseSeries


@dataclass(frozen=True)
class Precision:
    """Truncation data: p-adic precision N, z-degree bound M, X-degree bound D."""

    N: int
    M: int
    D: int

    def as_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "D": self.D}


def default_degree(p: int) -> int:
    return p * p + 1


def precision_policy(p: int, e: int, D: int | None = None) -> Precision:
    """N = floor(log_p D) + 2 and M = p·e·(p^k - 1)/(p - 1) + p·e.

    Enough for the Honda recursion at v = z^(pe) and for one application of
    z -> z^p to the law with v = z^e.
    """
    D = default_degree(p) if D is None else D
    if D < p:
        raise ValueError(f"truncation degree D = {D} must be at least p = {p}")
    k = log_depth(p, D)
    return Precision(k + 2, p * e * (p**k - 1) // (p - 1) + p * e, D)


@dataclass(frozen=True)
class SuiteEntry:
    """A suite field given by integer data; built at any precision without lifting loss."""

    p: int
    f: int
    e: int
    theta: tuple
    label: str

    def field(self, N: int = 1) -> LocalFieldData:
        return validate_eisenstein(PrimeParams(self.p, N, self.f), self.e, list(self.theta))


DEFAULT_SUITE = (
    SuiteEntry(2, 1, 1, (-1,), "Q_2: E = z - 2"),
    SuiteEntry(2, 1, 2, (-1,), "Q_2(sqrt 2): E = z^2 - 2"),
    SuiteEntry(2, 2, 1, (-1,), "Q_4 unramified: E = z - 2"),
    SuiteEntry(3, 1, 1, (-1,), "Q_3: E = z - 3"),
    SuiteEntry(3, 1, 2, (1, 1), "Q_3(zeta_3): E = z^2 + 3z + 3"),
    SuiteEntry(5, 1, 4, (1, 2, 2, 1), "Q_5(zeta_5): E = Phi_5(z + 1)"),
    SuiteEntry(5, 2, 1, (-1,), "Q_25 unramified: E = z - 5"),
)


def default_suite() -> tuple[SuiteEntry, ...]:
    return DEFAULT_SUITE


def s_ring(L: LocalFieldData, prec: Precision) -> BaseRing:
    """W_N(F_q)[[z]]/(z^(M+1)) at the given precision."""
    return BaseRing.truncated(L.params.with_precision(prec.N), prec.M)


def _at(L: LocalFieldData, ring: BaseRing) -> LocalFieldData:
    return L if L.params == ring.params else L.at_precision(ring.params.N)


# orientation images -------------------------------------------------------


def v1_image_tc(L: LocalFieldData, ring: BaseRing | None = None) -> TCMinusElement:
    """Image of x_(p-1) in TC^-: t·x^p normalized, i.e. E_L(z)·x^(p-1) (unit fixed to 1)."""
    ring = s_ring(L, precision_policy(L.p, L.e)) if ring is None else ring
    L = _at(L, ring)
    return TCMinusElement.t(L, ring) * TCMinusElement.x(L, ring) ** L.p


def v1_image_tp(L: LocalFieldData, route: str = "via_phi", ring: BaseRing | None = None) -> TPElement:
    """Image of x_(p-1) in TP, through φ or through the localization map.

    via_phi gives φ(E_L(z))·t^(1-p); via_localization gives E_L(z)^p·t^(1-p).
    """
    v1 = v1_image_tc(L, ring)
    if route == "via_phi":
        return frobenius_phi(v1)
    if route == "via_localization":
        return tc_to_tp(v1)
    raise ValueError(f"unknown route {route!r}; expected via_phi or via_localization")


# the two mod-p laws ---------------------------------------------------------


def _mod_p(law: FormalGroupLaw) -> FormalGroupLaw:
    if law.ring.params.N == 1:
        return law
    return base_change_fgl(law, reduction_map(law.ring, 1))


def _expect_height(law: FormalGroupLaw, expected_z: int, name: str) -> HeightReport:
    report = p_height_mod_p(law)
    want = BaseSeries.z(law.ring, expected_z)
    if report.height != 1 or report.leading != want:
        raise CheckFailedError(
            f"{name}: expected height 1 with leading coefficient z^{expected_z}, got {report.status}"
            + (f" with leading coefficient {report.leading}" if report.leading is not None else "")
        )
    return report


def build_tc_fgl_mod_p(L: LocalFieldData, D: int | None = None, prec: Precision | None = None) -> FormalGroupLaw:
    """F: the Honda law with v = z^e over F_q[[z]] truncated, height checked."""
    prec = precision_policy(L.p, L.e, D) if prec is None else prec
    ring = s_ring(L, prec)
    law = _mod_p(honda_law(BaseSeries.z(ring, L.e), prec.D))
    law = FormalGroupLaw(law.F, f"F on TC^-/p, {law.ring.describe()}")
    _expect_height(law, L.e, "F")
    return law


def build_tp_fgl_mod_p(
    L: LocalFieldData, D: int | None = None, prec: Precision | None = None, F: FormalGroupLaw | None = None
) -> FormalGroupLaw:
    """G: F pushed along the base Frobenius (σ on coefficients, z -> z^p), height checked."""
    prec = precision_policy(L.p, L.e, D) if prec is None else prec
    F = build_tc_fgl_mod_p(L, prec=prec) if F is None else F
    law = base_change_fgl(F, frobenius_map(F.ring))
    law = FormalGroupLaw(law.F, f"G on TP/p, {law.ring.describe()}")
    _expect_height(law, L.p * L.e, "G")
    return law


def direct_tp_fgl_mod_p(L: LocalFieldData, D: int | None = None, prec: Precision | None = None) -> FormalGroupLaw:
    """The Honda law with v = z^(pe), built from scratch; the second route to G."""
    prec = precision_policy(L.p, L.e, D) if prec is None else prec
    ring = s_ring(L, prec)
    return _mod_p(honda_law(BaseSeries.z(ring, L.p * L.e), prec.D))


# degeneration -----------------------------------------------------------------


@dataclass(frozen=True)
class DegenerationReport:
    specialized_height: HeightReport
    pseries_vanishes: bool
    eisenstein_at_uniformizer_vanishes: bool
    eisenstein_mod_p_vanishes: bool

    @property
    def passed(self) -> bool:
        return (
            self.pseries_vanishes
            and self.specialized_height.additive_or_undetermined
            and self.eisenstein_at_uniformizer_vanishes
            and self.eisenstein_mod_p_vanishes
        )


def degeneration_checks(L: LocalFieldData, D: int | None = None, F: FormalGroupLaw | None = None) -> DegenerationReport:
    """Specialize F to O_L/p = F_q[z]/(z^e) and check that it turns additive.

    Also checks E_L(ϖ_L) = 0 in O_L and that E_L mod p = z^e dies under the
    same specialization.
    """
    F = build_tc_fgl_mod_p(L, D) if F is None else F
    L1 = _at(L, F.ring)
    spec = base_change_fgl(F, specialization_map(F.ring, L1))
    height = p_height_mod_p(spec)
    pseries = n_series(spec, L.p)
    e_at_pi = evaluate_eisenstein(L, L.uniformizer)
    e_mod_p = specialize(eisenstein_mod_p(L1, F.ring.M), L1)
    return DegenerationReport(
        specialized_height=height,
        pseries_vanishes=not pseries,
        eisenstein_at_uniformizer_vanishes=not e_at_pi,
        eisenstein_mod_p_vanishes=not e_mod_p,
    )


# the bundle --------------------------------------------------------------------


@dataclass
class TheoremReport:
    """Everything computed for one local field, plus named pass/fail checks."""

    field: LocalFieldData
    precision: Precision
    v1_tc: TCMinusElement
    v1_tp: TPElement
    v1_tp_localization: TPElement
    F: FormalGroupLaw
    G: FormalGroupLaw
    G_direct: FormalGroupLaw
    heights: tuple[HeightReport, HeightReport]
    degeneration: DegenerationReport
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [(name, detail) for name, ok, detail in self.checks if not ok]


def _pseries_low_terms_vanish(law: FormalGroupLaw) -> bool:
    s = n_series(law, law.ring.params.p)
    return all(not s.coefficient(k) for k in range(1, law.ring.params.p))


def run_theorem(L: LocalFieldData, D: int | None = None, prec: Precision | None = None) -> TheoremReport:
    """Build and check everything the theorem, corollary and remark assert for L."""
    p, e = L.p, L.e
    prec = precision_policy(p, e, D) if prec is None else prec
    L = L.at_precision(prec.N) if L.params.N < prec.N else L
    ring = s_ring(L, prec)
    checks = []

    def record(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a raised error is a failed check, named
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append((name, bool(ok), detail))

    v1_tc = v1_image_tc(L, ring)
    v1_tp = v1_image_tp(L, "via_phi", ring)
    v1_loc = v1_image_tp(L, "via_localization", ring)
    E = L.eisenstein_in(ring)
    expected_tc = TCMinusElement(L, ring, {(p - 1, 0): E})
    record("v1 image in TC^- is E_L(z) x^(p-1)", lambda: (v1_tc == expected_tc, str(v1_tc)))
    record("v1 image in TC^- has degree 2p-2", lambda: (degree(v1_tc) == 2 * p - 2, f"degree {degree(v1_tc)}"))
    record("phi(v1) has degree 2p-2", lambda: (degree(v1_tp) == 2 * p - 2, f"degree {degree(v1_tp)}"))
    record(
        "v1 via localization is E_L(z)^p t^(1-p)",
        lambda: (v1_loc == TPElement(L, ring, {1 - p: E**p}), str(v1_loc)),
    )
    zpe = {1 - p: BaseSeries.z(ring.at_precision(1), p * e)}
    record(
        "v1 via phi mod p is z^(pe) t^(1-p)",
        lambda: (v1_tp.at_precision(1).terms == zpe, str(v1_tp.at_precision(1))),
    )
    record(
        "v1 routes agree mod p",
        lambda: (v1_tp.at_precision(1) == v1_loc.at_precision(1), str(v1_loc.at_precision(1))),
    )

    F = build_tc_fgl_mod_p(L, prec=prec)
    G = build_tp_fgl_mod_p(L, prec=prec, F=F)
    G_direct = direct_tp_fgl_mod_p(L, prec=prec)
    hF, hG = p_height_mod_p(F), p_height_mod_p(G)
    record("F has height 1, leading z^e", lambda: (hF.height == 1 and hF.leading == BaseSeries.z(F.ring, e), hF.status))
    record(
        "G has height 1, leading z^(pe)",
        lambda: (hG.height == 1 and hG.leading == BaseSeries.z(G.ring, p * e), hG.status),
    )
    record("[p]_F has no terms X^k, 1 < k < p", lambda: (_pseries_low_terms_vanish(F), ""))
    record("[p]_G has no terms X^k, 1 < k < p", lambda: (_pseries_low_terms_vanish(G), ""))
    record("G = Frobenius push-forward of F = Honda law at z^(pe)", lambda: (G.F == G_direct.F, ""))
    for name, law in (("F", F), ("G", G), ("Honda(z^(pe))", G_direct)):
        record(f"axioms for {name}", lambda law=law: ((c := check_axioms(law)).passed, str(c)))

    degen = degeneration_checks(L, prec.D, F=F)
    record(
        "F specialized to O_L/p is additive to degree D",
        lambda: (degen.pseries_vanishes and degen.specialized_height.additive_or_undetermined,
                 degen.specialized_height.status),
    )
    record("E_L(uniformizer) = 0 in O_L", lambda: (degen.eisenstein_at_uniformizer_vanishes, ""))
    record("E_L mod p = z^e vanishes in O_L/p", lambda: (degen.eisenstein_mod_p_vanishes, ""))

    return TheoremReport(L, prec, v1_tc, v1_tp, v1_loc, F, G, G_direct, (hF, hG), degen, checks)


__all__ = [
    "DEFAULT_SUITE",
    "DegenerationReport",
    "Precision",
    "SuiteEntry",
    "TheoremReport",
    "build_tc_fgl_mod_p",
    "build_tp_fgl_mod_p",
    "default_suite",
    "degeneration_checks",
    "direct_tp_fgl_mod_p",
    "precision_policy",
    "run_theorem",
    "s_ring",
    "v1_image_tc",
    "v1_image_tp",
]
