import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morava_chern.polyring import (
    GF,
    QQ,
    NonNilpotentSubstitution,
    NotReversible,
    WeightedPoly,
    ZZp,
    is_symmetric,
    partitions_of,
    revert,
    symmetrize,
)

XY = ("x", "y")


def gen(name, vars=XY, ring=QQ, bound=None, weights=None):
    return WeightedPoly.gen(name, ring, vars, weights, bound)


def uni(coeffs, D, ring=QQ):
    return WeightedPoly(ring, ("x",), None, {(k,): c for k, c in enumerate(coeffs) if c}, D)


# oracles ---------------------------------------------------------------------


def _series_mul(a, b, D):
    out = [Fraction(0)] * (D + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= D:
                out[i + j] += x * y
    return out


def _series_compose(f, g, D):
    out = [Fraction(0)] * (D + 1)
    power = [Fraction(1)] + [Fraction(0)] * D
    for k, c in enumerate(f):
        if k:
            power = _series_mul(power, g, D)
        out = [o + c * q for o, q in zip(out, power)]
    return out


def revert_oracle(f, D):
    """Fixed-point iteration g <- g - (f(g) - x), one correct degree per round."""
    x = [Fraction(0), Fraction(1)] + [Fraction(0)] * (D - 1)
    g = list(x)
    for _ in range(D):
        fg = _series_compose(f, g, D)
        g = [gi - (a - b) for gi, a, b in zip(g, fg, x)]
    return g


def partitions_oracle(m):
    out = set()
    for l in range(0, m + 1):
        for combo in itertools.combinations_with_replacement(range(1, m + 1), l):
            if sum(combo) == m:
                out.add(tuple(sorted(combo, reverse=True)))
    return out


# arithmetic -------------------------------------------------------------------


def test_difference_of_squares():
    x, y = gen("x"), gen("y")
    assert (x + y) * (x - y) == x ** 2 - y ** 2


def test_truncated_product():
    x = gen("x", ("x",), bound=2)
    assert (x + x ** 2) * (x + x ** 2) == x ** 2


def test_frobenius_mod_two():
    x, y = gen("x", ring=GF(2)), gen("y", ring=GF(2))
    assert (x + y) ** 2 == x ** 2 + y ** 2


def test_mismatched_rings_rejected():
    with pytest.raises(ValueError):
        gen("x") + gen("x", ring=GF(3))
    with pytest.raises(ValueError):
        gen("x") + gen("x", ("x", "z"))


def test_bound_is_minimum():
    a = gen("x", bound=3)
    b = gen("y", bound=5)
    assert (a * b).bound == 3


def test_weighted_truncation():
    c = ("c1", "c2")
    c1 = WeightedPoly.gen("c1", QQ, c, (1, 2), 4)
    c2 = WeightedPoly.gen("c2", QQ, c, (1, 2), 4)
    assert (c1 * c2 * c2).is_zero()
    assert (c1 ** 2 * c2).degree() == 4


def test_zp_rejects_denominators():
    with pytest.raises(ArithmeticError):
        WeightedPoly(ZZp(2), ("x",), None, {(1,): Fraction(1, 2)})


# substitution -----------------------------------------------------------------


def test_diagonal_pullback():
    z = ("z1", "z2")
    z1, z2 = gen("z1", z), gen("z2", z)
    assert (z1 * z2).substitute({"z2": z1}) == z1 ** 2


def test_segre_pullback():
    z = ("z1", "z2")
    z1, z2 = gen("z1", z), gen("z2", z)
    assert z1.substitute({"z1": z1 + z2 + z1 * z2}) == z1 + z2 + z1 * z2


def test_point_embedding():
    z = ("z1", "z2")
    z1, z2 = gen("z1", z), gen("z2", z)
    assert (z1 * z2).substitute({"z2": 0}, z1) == 0


def test_constant_term_into_series_rejected():
    f = uni([0, 1, 1, 1], 3)
    with pytest.raises(NonNilpotentSubstitution):
        f.substitute({"x": uni([1, 1], 3)})


def test_coefficient_of():
    f = uni([0, 1, 2], None)
    assert f.coefficient_of((2,)) == 2
    assert f.coefficient_of({"x": 5}) == 0
    log = uni([0] + [Fraction((-1) ** (k + 1), k) for k in range(1, 6)], 5)
    assert log.coefficient_of((3,)) == Fraction(1, 3)
    assert WeightedPoly.zero(QQ, XY).coefficient_of((1, 1)) == 0


# reversion --------------------------------------------------------------------


def test_revert_identity():
    assert revert(uni([0, 1], 6)) == uni([0, 1], 6)


def test_revert_catalan():
    D = 8
    g = revert(uni([0, 1, 1], D))
    oracle = revert_oracle([Fraction(0), Fraction(1), Fraction(1)], D)
    assert [g.coefficient_of((k,)) for k in range(D + 1)] == oracle
    # signed Catalan numbers, as the oracle confirms
    assert oracle[1:] == [1, -1, 2, -5, 14, -42, 132, -429]


def test_revert_log_gives_exp_minus_one():
    D = 8
    log = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, D + 1)]
    g = revert(uni(log, D))
    oracle = revert_oracle(log, D)
    assert [g.coefficient_of((k,)) for k in range(D + 1)] == oracle
    fact = 1
    for k in range(1, D + 1):
        fact *= k
        assert oracle[k] == Fraction(1, fact)


def test_revert_mod_p():
    D = 8
    g = revert(uni([0, 1, 1], D, GF(3)))
    assert [g.coefficient_of((k,)) for k in range(1, D + 1)] == [x % 3 for x in [1, -1, 2, -5, 14, -42, 132, -429]]


def test_revert_needs_unit():
    with pytest.raises(NotReversible):
        revert(uni([0, 0, 1], 4))
    with pytest.raises(NotReversible):
        revert(uni([0, 3, 1], 4, GF(3)))


# combinatorics ----------------------------------------------------------------


def test_symmetrize_examples():
    t = ("t1", "t2")
    t1, t2 = gen("t1", t), gen("t2", t)
    assert symmetrize((2, 1)) == t1 ** 2 * t2 + t1 * t2 ** 2
    assert symmetrize((1, 1)) == t1 * t2
    assert symmetrize((3, 0)) == t1 ** 3 + t2 ** 3


def test_is_symmetric_examples():
    t = ("t1", "t2")
    t1, t2 = gen("t1", t), gen("t2", t)
    assert is_symmetric(t1 * t2)
    assert not is_symmetric(t1 ** 2 * t2)
    assert is_symmetric(t1 ** 2 * t2 + t1 * t2 ** 2)


def test_partition_examples():
    assert len(partitions_of(4)) == 5
    assert partitions_of(3, 2) == [(2, 1)]
    assert partitions_of(0) == [()]


@pytest.mark.parametrize("m", range(0, 12))
def test_partitions_match_enumeration(m):
    got = partitions_of(m)
    assert set(got) == partitions_oracle(m)
    assert len(got) == len(set(got))
    assert got == sorted(got, reverse=True)


# properties ---------------------------------------------------------------------

coef = st.integers(-5, 5)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coef, max_size=6).map(
    lambda d: WeightedPoly(QQ, XY, None, d, 6)
)


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)


@settings(max_examples=60)
@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_revert_is_involutive(tail):
    D = 7
    f = uni([0, 1] + tail, D)
    assert revert(revert(f)) == f
    g = revert(f)
    assert f.substitute({"x": g}) == uni([0, 1], D)


nilpotent = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda e: sum(e) > 0), coef, max_size=4
).map(lambda d: WeightedPoly(QQ, XY, None, d, 6))


@settings(max_examples=60)
@given(polys, nilpotent, nilpotent, nilpotent, nilpotent)
def test_substitution_composes(f, s1, s2, t1, t2):
    sigma = {"x": s1, "y": s2}
    tau = {"x": t1, "y": t2}
    lhs = f.substitute(sigma).substitute(tau)
    composed = {"x": s1.substitute(tau), "y": s2.substitute(tau)}
    rhs = f.substitute(composed)
    D = min(lhs.bound, rhs.bound)
    assert lhs.truncate(D) == rhs.truncate(D)


@given(polys)
def test_serialization_deterministic(f):
    g = WeightedPoly(QQ, XY, None, dict(reversed(list(f.terms.items()))), f.bound)
    assert repr(f.serialize()) == repr(g.serialize())
    assert WeightedPoly.deserialize(f.serialize(), QQ, XY, None, f.bound) == f
