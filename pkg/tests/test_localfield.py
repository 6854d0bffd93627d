import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpfgl.coeff import PrimeParams
from tpfgl.errors import PrecisionError, ValidationError
from tpfgl.localfield import (
    NotEisensteinError,
    eisenstein_mod_p,
    evaluate_eisenstein,
    ol_arith,
    residue,
    specialize,
    validate_eisenstein,
)
from tpfgl.orientation import default_suite
from tpfgl.series import BaseRing, BaseSeries

SQRT2 = validate_eisenstein(PrimeParams(2, 4), 2, [-1])
ZETA5 = validate_eisenstein(PrimeParams(5, 3), 4, [1, 2, 2, 1])
FIELDS = [SQRT2, ZETA5, validate_eisenstein(PrimeParams(3, 3, 2), 2, [1, 1])]


def ol_elements(L):
    P = L.params.witt.modulus
    coeff = st.lists(st.integers(0, P - 1), min_size=L.f, max_size=L.f).map(tuple)
    return st.lists(coeff, min_size=L.e, max_size=L.e).map(L.element)


@st.composite
def triple(draw):
    L = draw(st.sampled_from(FIELDS))
    return tuple(draw(ol_elements(L)) for _ in range(3))


def test_sqrt2_arithmetic():
    pi = SQRT2.uniformizer
    assert pi * pi == 2
    assert (1 + pi) ** 2 == SQRT2.element([3, 2])
    assert SQRT2.describe() == "p=2 f=1 e=2 E(z)=14 + z^2*1"


def test_cyclotomic_eisenstein_data():
    # Φ_5(z + 1) = z^4 + 5z^3 + 10z^2 + 10z + 5
    assert [c[0] for c in ZETA5.eisenstein] == [5, 10, 10, 5, 1]
    zeta = ZETA5.uniformizer + 1
    assert zeta**5 == 1
    assert zeta != 1


def test_eisenstein_validation():
    with pytest.raises(NotEisensteinError):
        validate_eisenstein(PrimeParams(2, 3), 2, [-2])
    with pytest.raises(ValidationError):
        validate_eisenstein(PrimeParams(3, 3), 1, [1, 1])
    with pytest.raises(ValidationError):
        validate_eisenstein(PrimeParams(3, 3), 0, [1])


@pytest.mark.parametrize("entry", default_suite(), ids=lambda s: s.label)
def test_suite_fields_satisfy_defining_relation(entry):
    L = entry.field(4)
    assert not evaluate_eisenstein(L, L.uniformizer)
    assert not residue(L.uniformizer)
    R = BaseRing.truncated(L.params.with_precision(1), L.e)
    assert eisenstein_mod_p(L) == BaseSeries.z(R, L.e)


@settings(max_examples=60, deadline=None)
@given(triple())
def test_ol_is_commutative_ring(t):
    a, b, c = t
    assert ol_arith("mul", ol_arith("mul", a, b), c) == a * (b * c)
    assert a * (b + c) == ol_arith("add", a * b, a * c)
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(triple())
def test_residue_is_ring_hom(t):
    a, b, _ = t
    assert residue(a + b) == residue(a) + residue(b)
    assert residue(a * b) == residue(a) * residue(b)


def test_residue_surjective():
    L = FIELDS[2]
    field = L.params.with_precision(1)
    hit = {residue(L.element([(a, b)])).coeffs for a in range(3) for b in range(3)}
    assert len(hit) == field.q


def test_specialize_precision_guard():
    L = SQRT2
    ok = BaseRing.truncated(L.params, 7)
    s = BaseSeries(ok, {3: 1})
    assert specialize(s, L) == (L.uniformizer**3).value
    short = BaseRing.truncated(L.params, 6)
    with pytest.raises(PrecisionError):
        specialize(BaseSeries.z(short), L)
