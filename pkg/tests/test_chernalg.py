import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morava_chern.chernalg import (
    CartanTable,
    LemmaCheckFailed,
    cartan_derivative,
    chern_gen,
    discrete_taylor,
    k0_g1_series,
    k0_log_components,
    lemma_valuation_checks,
    log_components,
    specialize_component,
)
from morava_chern.exactnum import INF
from morava_chern.fgl import additive_law, multiplicative_law
from morava_chern.polyring import QQ, WeightedPoly

from conftest import law


def c(i, D):
    return chern_gen(i, D)


# P_i ---------------------------------------------------------------------------


def test_small_components_2_1():
    D = 4
    comps = log_components(law(2, 1, D), D)
    assert comps[0].P.is_zero()
    # log x = x + x^2/2 + x^4/4 applied to c1 + c2 + c3 + c4, collected by weight
    assert comps[1].P == c(1, D) ** 2 * Fraction(-1, 2)
    assert comps[2].P == -(c(1, D) * c(2, D))
    P4 = c(1, D) ** 4 * Fraction(-1, 4) - c(1, D) * c(3, D) + c(2, D) ** 2 * Fraction(-1, 2)
    assert comps[3].P == P4
    assert (comps[3].nu, comps[3].mu) == (-2, 2)


@pytest.mark.parametrize("p,n,D", [(2, 1, 16), (2, 2, 16), (3, 1, 9)])
def test_line_bundle_specialization(p, n, D):
    """On a single line bundle (c1 = x, others 0), P_i is minus the x^i
    coefficient of the logarithm."""
    M = law(p, n, D)
    for r in log_components(M, D):
        assign = {v: (WeightedPoly.gen("x", QQ, ("x",)) if v == "c1" else 0) for v in r.P.vars}
        val = r.P.with_bound(None).substitute(assign, WeightedPoly.zero(QQ, ("x",)))
        expected = 0 if r.i == 1 else -M.log.coefficient_of((r.i,))
        assert val.coefficient_of((r.i,)) == expected


@pytest.mark.parametrize("p,n,D", [(2, 1, 16), (2, 2, 16), (3, 1, 9)])
def test_components_below_height_and_first_pole(p, n, D):
    M = law(p, n, D)
    comps = log_components(M, D)
    q = p ** n
    for r in comps[: q - 1]:
        assert r.P.is_zero() and r.nu is INF and r.mu == 0
    assert comps[q - 1].P == c(1, D) ** q * (-M.a_seq[0] / p)


@pytest.mark.parametrize("p,n,D", [(2, 1, 16), (2, 2, 16), (3, 1, 9)])
def test_lemma_grid(p, n, D):
    M = law(p, n, D)
    comps = log_components(M, D)
    for i in range(1, D + 1):
        rep = lemma_valuation_checks(M, i, comps)
        assert rep["part1"] and rep["part2"]
        if rep["k"] > 0:
            assert rep["nu"] == -rep["k"]
            assert rep["part2p"] and rep["scalar"] % p


def test_lemma_detects_tampering():
    M = law(2, 1, 8)
    comps = log_components(M, 8)
    bad = list(comps)
    r = comps[3]
    bad[3] = type(r)(r.i, r.P.scale(Fraction(1, 2)), r.nu - 1, r.mu + 1)
    with pytest.raises(LemmaCheckFailed):
        lemma_valuation_checks(M, 4, bad)


def test_specialize_component():
    D = 4
    P = c(1, D) * c(3, D) + c(2, D) ** 2
    # mod p^n - 1 = 3 for (2, 2): component 1 keeps c1 and c4 only
    assert specialize_component(P, 1, 2, 2).is_zero()
    assert specialize_component(P, 2, 2, 2) == c(2, D) ** 2


# K_0 -----------------------------------------------------------------------------


def test_k0_classics():
    P = k0_log_components(6)
    D = 6
    assert P[1] == c(2, D).scale(2) + c(1, D) ** 2
    assert P[2] == c(3, D).scale(3) + c(1, D) * c(2, D) * 3 + c(1, D) ** 3
    z = WeightedPoly.gen("z", QQ, ("z",))
    for n, Pn in enumerate(P, 1):
        assert all(v.denominator == 1 for v in Pn.terms.values())
        assert k0_g1_series(Pn) == z ** n


# Cartan derivatives ----------------------------------------------------------------


def test_additive_law_has_no_cross_terms():
    T = CartanTable(additive_law(6))
    assert all(T.dc[i].is_zero() for i in range(1, 7))


def test_multiplicative_cross_terms():
    # F(x, y) = x + y + xy, so the weight-i cross term is sum_{j+k=i} c_j c'_k
    D = 5
    T = CartanTable(multiplicative_law(D))
    for i in range(1, D + 1):
        names = T.dc[i].vars
        expected = WeightedPoly.zero(QQ, names, T.dc[i].weights, D)
        for j in range(1, i):
            expected = expected + (WeightedPoly.gen(f"c{j}_1", QQ, names, T.dc[i].weights, D)
                                   * WeightedPoly.gen(f"c{i - j}_2", QQ, names, T.dc[i].weights, D))
        assert T.dc[i] == expected


def test_cartan_c4_height_two():
    D = 4
    T = CartanTable(law(2, 2, D))
    names, w = T.dc[4].vars, T.dc[4].weights
    a = WeightedPoly.gen("c1_1", QQ, names, w, D)
    b = WeightedPoly.gen("c1_2", QQ, names, w, D)
    assert T.dc[4] == (a ** 3 * b).scale(-2) + (a ** 2 * b ** 2).scale(-3) + (a * b ** 3).scale(-2)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_cartan_derivative_of_generator(p, n):
    D = 8
    T = CartanTable(law(p, n, D))
    for i in range(1, D + 1):
        assert cartan_derivative(c(i, D), 1, T) == T.dc[i]


def test_second_derivative_symmetric():
    D = 6
    T = CartanTable(law(2, 1, D))
    for i in range(1, D + 1):
        d2 = cartan_derivative(T.dc[i], 1, T)
        swap = {f"c{j}_{s}": f"c{j}_{t}" for j in range(1, D + 1) for s, t in [(1, 2), (2, 1)]}
        assert d2.rename(swap).embed(d2.vars, d2.weights, D) == d2
        if i >= 3:
            assert not d2.is_zero()


def test_cartan_derivative_slot_range():
    T = CartanTable(law(2, 1, 4))
    with pytest.raises(ValueError):
        cartan_derivative(c(2, 4), 2, T)


# discrete Taylor ----------------------------------------------------------------------


def _inclusion_exclusion(f, args):
    """d^(s) f(a_0..a_s) = sum over subsets J of (-1)^(s+1-|J|) f(sum J)."""
    total = 0
    for size in range(0, len(args) + 1):
        for J in itertools.combinations(args, size):
            total += (-1) ** (len(args) - size) * f(sum(J))
    return total


@settings(max_examples=50)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5),
       st.lists(st.integers(-3, 3), min_size=1, max_size=5))
def test_discrete_taylor_reconstructs(args, poly):
    def f(x):
        return sum(a * x ** k for k, a in enumerate(poly, 1))

    got = discrete_taylor(lambda s, sub: _inclusion_exclusion(f, sub), args)
    assert got == f(sum(args))


def test_discrete_taylor_empty():
    with pytest.raises(ValueError):
        discrete_taylor(lambda s, sub: 0, [])
