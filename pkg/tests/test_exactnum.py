from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from morava_chern.exactnum import (
    INF,
    NotPIntegral,
    PrimeField,
    format_rational,
    is_p_integral,
    nu_p,
    parse_rational,
    reduce_mod_p,
)


def test_nu_p_examples():
    assert nu_p(Fraction(8, 3), 2) == 3
    assert nu_p(Fraction(1, 9), 3) == -2
    assert nu_p(0, 5) is INF
    assert INF > 10 ** 100


def test_nu_p_rejects_composite():
    with pytest.raises(ValueError):
        nu_p(3, 4)


def test_is_p_integral_examples():
    assert is_p_integral(Fraction(3, 5), 2)
    assert not is_p_integral(Fraction(1, 2), 2)
    assert is_p_integral(0, 7)


def test_reduce_mod_p_examples():
    assert reduce_mod_p(Fraction(3, 5), 2) == 1
    assert reduce_mod_p(4, 2) == 0
    assert reduce_mod_p(Fraction(1, 3), 5) == 2
    with pytest.raises(NotPIntegral):
        reduce_mod_p(Fraction(1, 2), 2)


def test_text_form_round_trip():
    for x in [Fraction(-5, 4), Fraction(3), Fraction(0)]:
        assert parse_rational(format_rational(x)) == x
    assert format_rational(Fraction(-5, 4)) == "-5/4"
    assert format_rational(3) == "3"


def test_prime_field_arithmetic():
    a = PrimeField(3, 7)
    assert a * a.inverse() == 1
    assert (a ** 6) == 1
    assert -a == 4


rationals = st.fractions(max_denominator=10 ** 6).filter(lambda x: x != 0)
primes = st.sampled_from([2, 3, 5, 7, 11])


@given(rationals, rationals, primes)
def test_valuation_is_multiplicative(x, y, p):
    assert nu_p(x * y, p) == nu_p(x, p) + nu_p(y, p)


@given(rationals, rationals, primes)
def test_valuation_ultrametric(x, y, p):
    s = x + y
    if s == 0:
        return
    lo = min(nu_p(x, p), nu_p(y, p))
    assert nu_p(s, p) >= lo
    if nu_p(x, p) != nu_p(y, p):
        assert nu_p(s, p) == lo


@given(st.fractions(max_denominator=1000), st.fractions(max_denominator=1000), primes)
def test_reduction_is_a_ring_map(x, y, p):
    if not (is_p_integral(x, p) and is_p_integral(y, p)):
        return
    rx, ry = reduce_mod_p(x, p), reduce_mod_p(y, p)
    assert reduce_mod_p(x + y, p) == rx + ry
    assert reduce_mod_p(x * y, p) == rx * ry


@given(rationals)
def test_inverse_round_trip(x):
    assert x * (1 / x) == 1
