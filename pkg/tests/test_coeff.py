import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpfgl.coeff import (
    FqElement,
    PrimeParams,
    WittCoords,
    WittElement,
    assemble,
    default_modulus,
    format_witt,
    is_irreducible_mod_p,
    is_prime,
    teichmuller_expansion,
    teichmuller_lift,
    witt_frobenius,
    witt_oracle,
    witt_polynomials,
)
from tpfgl.errors import NonUnitError, ParameterMismatchError, UnsupportedPrecisionError, ValidationError

GRID = [(p, f, N) for p in (2, 3, 5) for f in (1, 2) for N in (1, 2, 3)]


def elements(params):
    P = params.witt.modulus
    return st.lists(st.integers(0, P - 1), min_size=params.f, max_size=params.f).map(
        lambda c: WittElement(params.witt, c)
    )


@st.composite
def grid_triple(draw):
    p, f, N = draw(st.sampled_from(GRID))
    params = PrimeParams(p, N, f)
    return tuple(draw(elements(params)) for _ in range(3))


def test_primality_and_moduli():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert default_modulus(2, 2) == (1, 1, 1)
    assert default_modulus(3, 1) == (0, 1)
    assert is_irreducible_mod_p((1, 0, 1), 3)  # -1 is not a square mod 3
    assert not is_irreducible_mod_p((1, 0, 1), 5)  # u^2 + 1 = (u - 2)(u + 2) mod 5


def test_params_reject_bad_input():
    with pytest.raises(ValidationError):
        PrimeParams(4)
    with pytest.raises(ValidationError):
        PrimeParams(2, 0)
    with pytest.raises(ValidationError):
        PrimeParams(5, 1, 2, (1, 0, 1))


def test_integer_arithmetic_mod_p_power():
    W = PrimeParams(3, 2).witt
    a, b = WittElement(W, [5]), WittElement(W, [7])
    assert (a * b).coeffs == (35 % 9,)
    assert (a + b).coeffs == (3,)
    assert a.inverse() * a == 1


def test_f2_modulus_relation():
    params = PrimeParams(2, 3, 2)
    u = params.element([0, 1])
    # m = u^2 + u + 1
    assert u * u + u + 1 == 0
    assert u**3 == 1


def test_frobenius_reduces_to_pth_power():
    params = PrimeParams(5, 3, 2)
    rng = random.Random(3)
    for _ in range(30):
        a = params.element([rng.randrange(125), rng.randrange(125)])
        assert witt_frobenius(a).residue() == a.residue() ** 5
    u = params.element([0, 1])
    assert witt_frobenius(witt_frobenius(u)) == u  # σ has order f


def test_frobenius_is_identity_on_zp():
    W = PrimeParams(3, 3).witt
    for n in range(27):
        assert witt_frobenius(WittElement(W, [n])) == WittElement(W, [n])


def test_teichmuller_lift_is_multiplicative_root_of_unity():
    params = PrimeParams(5, 3, 2)
    field = params.with_precision(1)
    for a in range(25):
        x = FqElement(field.witt, [a % 5, a // 5])
        w = teichmuller_lift(x, 3)
        assert w.residue() == x
        if a:
            assert w ** (params.q - 1) == 1
        assert witt_frobenius(w) == w**5


def test_units_and_inverse():
    W = PrimeParams(2, 3, 2).witt
    two = WittElement(W, [2, 0])
    assert not two.is_unit()
    with pytest.raises(NonUnitError):
        two.inverse()
    assert two.valuation() == 1
    x = WittElement(W, [1, 3])
    assert x * x.inverse() == 1


def test_mismatched_rings_raise():
    with pytest.raises(ParameterMismatchError):
        PrimeParams(3, 2).element([1]) + PrimeParams(3, 3).element([1])


def test_format():
    assert format_witt((3, 2, 1)) == "3 + 2*u + 1*u^2"
    assert format_witt((0, 0)) == "0"


@settings(max_examples=200, deadline=None)
@given(grid_triple())
def test_ring_axioms(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@settings(max_examples=200, deadline=None)
@given(grid_triple())
def test_frobenius_is_ring_hom(triple):
    a, b, _ = triple
    assert witt_frobenius(a + b) == witt_frobenius(a) + witt_frobenius(b)
    assert witt_frobenius(a * b) == witt_frobenius(a) * witt_frobenius(b)


@settings(max_examples=200, deadline=None)
@given(grid_triple())
def test_teichmuller_round_trip(triple):
    a = triple[0]
    assert assemble(teichmuller_expansion(a)) == a


@settings(max_examples=150, deadline=None)
@given(grid_triple())
def test_witt_oracle_matches_unramified_model(triple):
    a, b, _ = triple
    ca, cb = teichmuller_expansion(a), teichmuller_expansion(b)
    assert assemble(witt_oracle("add", ca, cb)) == a + b
    assert assemble(witt_oracle("mul", ca, cb)) == a * b


def test_witt_polynomials_known_values():
    # p = 2: S_1 = a1 + b1 - a0*b0 and P_1 = a0^2 b1 + a1 b0^2 + 2 a1 b1
    polys = witt_polynomials(2, 2)
    assert polys["add"][1] == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}
    assert polys["mul"][1] == {(2, 0, 0, 1): 1, (0, 1, 2, 0): 1, (0, 1, 0, 1): 2}


def test_witt_oracle_bounds():
    with pytest.raises(UnsupportedPrecisionError):
        witt_polynomials(2, 4)
    params = PrimeParams(2, 2)
    with pytest.raises(ValidationError):
        WittCoords(params, (params.fq([1]),))


def test_witt_oracle_carry_in_w2_f2():
    # 1 + 1 = 2 carries into the second Witt coordinate
    params = PrimeParams(2, 2)
    one = teichmuller_expansion(params.element([1]))
    assert [c.coeffs for c in one.coords] == [(1,), (0,)]
    two = witt_oracle("add", one, one)
    assert [c.coeffs for c in two.coords] == [(0,), (1,)]
    assert assemble(two) == 2
