import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpfgl.bkring import (
    TCMinusElement,
    TPElement,
    degree,
    frobenius_phi,
    normalize,
    rewrite_step,
    tc_to_tp,
    tp_multiply,
)
from tpfgl.checks import random_raw_product
from tpfgl.coeff import PrimeParams
from tpfgl.errors import ParameterMismatchError, ZOverflowError
from tpfgl.localfield import validate_eisenstein
from tpfgl.series import BaseRing, BaseSeries, base_frobenius_sub

Q3 = validate_eisenstein(PrimeParams(3, 4), 1, [-1])
R = BaseRing.truncated(Q3.params, 30)
E = Q3.eisenstein_in(R)
x, t = TCMinusElement.x(Q3, R), TCMinusElement.t(Q3, R)

SQ2 = validate_eisenstein(PrimeParams(2, 4), 2, [-1])
R2 = BaseRing.truncated(SQ2.params, 40)


def tp(power, c=1, L=Q3, ring=R):
    return TPElement(L, ring, {power: c})


def test_relation_and_rewriting():
    assert x * t == TCMinusElement.scalar(Q3, R, E)
    assert x * x * t == TCMinusElement(Q3, R, {(1, 0): E})
    assert (x * t) * (x * t) == TCMinusElement.scalar(Q3, R, E**2)
    assert x**2 * t**3 == TCMinusElement(Q3, R, {(0, 1): E**2})


def test_rewrite_step_is_a_single_step():
    raw = {(2, 1): BaseSeries.one(R)}
    once = rewrite_step(Q3, R, raw)
    assert once == {(1, 0): E}
    assert rewrite_step(Q3, R, once) is None


def test_laurent_products():
    assert tp(1) * tp(-1) == TPElement.scalar(Q3, R, 1)
    z = BaseSeries.z(R)
    assert tp(1, z) * tp(-1, z * z) == TPElement.scalar(Q3, R, z**3)
    s = tp(1) + tp(-1)
    assert s * s == tp(2) + tp(0, 2) + tp(-2)
    assert tp_multiply(tp(3), tp(-1) ** 3) == TPElement.scalar(Q3, R, 1)


def test_localization_map():
    assert tc_to_tp(x) == tp(-1, E)
    assert tc_to_tp(x * x) == tp(-2, E**2)
    assert tc_to_tp(x * t) == TPElement.scalar(Q3, R, E)
    assert tc_to_tp(t) == tp(1)


def test_frobenius_phi_examples():
    # E = z - 3, σ = id on Z_3, z -> z^3
    phiE = BaseSeries(R, {0: -3, 3: 1})
    assert frobenius_phi(t) == tp(1, phiE)
    assert frobenius_phi(x) == tp(-1)
    assert frobenius_phi(x * t) == TPElement.scalar(Q3, R, phiE)
    assert frobenius_phi(t) * frobenius_phi(x) == frobenius_phi(x * t)
    z = TCMinusElement.scalar(Q3, R, BaseSeries.z(R))
    assert frobenius_phi(z) == TPElement.scalar(Q3, R, BaseSeries.z(R, 3))


def test_frobenius_on_unramified_coefficients_uses_sigma():
    L = validate_eisenstein(PrimeParams(2, 3, 2), 1, [-1])
    ring = BaseRing.truncated(L.params, 6)
    u = BaseSeries(ring, {0: (0, 1)})
    img = frobenius_phi(TCMinusElement.scalar(L, ring, u))
    assert img == TPElement.scalar(L, ring, base_frobenius_sub(u))
    assert img != TPElement.scalar(L, ring, u)


def test_phi_overflow_is_loud():
    small = BaseRing.truncated(Q3.params, 2)
    with pytest.raises(ZOverflowError):
        frobenius_phi(TCMinusElement.t(Q3, small))


def test_degree():
    assert degree(x) == 2
    assert degree(tp(-2)) == 4
    assert degree(x + t) is None
    assert degree(x**3 * t) == 4


def test_mismatched_fields_raise():
    with pytest.raises(ParameterMismatchError):
        x + TCMinusElement.x(SQ2, R2)
    with pytest.raises(ParameterMismatchError):
        x * tp(1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_confluence(seed):
    rng = random.Random(seed)
    raw = random_raw_product(rng, SQ2, R2)
    ref = normalize(SQ2, R2, raw)
    assert normalize(SQ2, R2, raw, rng) == ref
    assert all(not (a and b) for a, b in ref.terms)


def homogeneous(L, ring, max_deg=2):
    P = ring.witt.modulus
    coeff = st.dictionaries(st.integers(0, max_deg), st.integers(0, P - 1), min_size=1, max_size=max_deg + 1)
    return st.tuples(st.integers(-2, 2), coeff).map(
        lambda kc: TCMinusElement(L, ring, {(kc[0], 0) if kc[0] >= 0 else (0, -kc[0]): BaseSeries(ring, kc[1])})
    )


@settings(max_examples=120, deadline=None)
@given(homogeneous(SQ2, R2), homogeneous(SQ2, R2))
def test_maps_are_graded_ring_homs(a, b):
    for f in (frobenius_phi, tc_to_tp):
        assert f(a * b) == f(a) * f(b)
        assert f(a + b) == f(a) + f(b)
        for el in (a, b, a * b):
            if el:
                assert degree(f(el)) == degree(el)


@settings(max_examples=60, deadline=None)
@given(homogeneous(Q3, R), homogeneous(Q3, R))
def test_products_land_in_one_normal_monomial(a, b):
    ab = a * b
    if ab:
        d = degree(ab)
        assert d == degree(a) + degree(b)
        want = (d // 2, 0) if d >= 0 else (0, -d // 2)
        assert set(ab.terms) == {want}
