"""The compiled kernels must agree with the pure-Python ones exactly."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morava_chern import _kernels_py, kernels

compiled = pytest.importorskip("morava_chern._kernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


term_maps = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-50, 50), max_size=12
)


@given(term_maps, term_maps, st.one_of(st.none(), st.integers(0, 8)), st.sampled_from([0, 2, 3, 7]))
def test_mul_terms_agree(a, b, bound, modulus):
    w = (1, 2)
    assert compiled.mul_terms(a, b, w, bound, modulus) == _kernels_py.mul_terms(a, b, w, bound, modulus)


matrices = st.integers(1, 6).flatmap(
    lambda nc: st.lists(st.lists(st.integers(-9, 9), min_size=nc, max_size=nc), min_size=0, max_size=6)
    .map(lambda rows: (rows, nc))
)


@settings(max_examples=200)
@given(matrices, st.sampled_from([2, 3, 5, 7]))
def test_rref_agree(m, p):
    rows, nc = m
    assert compiled.rref_mod_p(rows, nc, p) == _kernels_py.rref_mod_p(rows, nc, p)


@settings(max_examples=200)
@given(matrices)
def test_echelon_agree(m):
    rows, nc = m
    assert compiled.echelon_int(rows, nc) == _kernels_py.echelon_int(rows, nc)


def test_rref_large_prime_falls_back():
    p = 2 ** 61 - 1
    rows = [[p - 1, 3], [5, p - 2]]
    assert compiled.rref_mod_p(rows, 2, p) == _kernels_py.rref_mod_p(rows, 2, p)
