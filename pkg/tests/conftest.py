import functools

import pytest

from morava_chern.chernbuild import build_chern_classes
from morava_chern.fgl import MoravaLaw

CONFIGS = [(2, 1), (3, 1), (2, 2)]
BUILD_DEGREE = {(2, 1): 8, (2, 2): 8, (3, 1): 9}


@functools.lru_cache(maxsize=None)
def law(p, n, D):
    return MoravaLaw(p, n, None, D)


@functools.lru_cache(maxsize=None)
def chern_set(p, n):
    D = BUILD_DEGREE[(p, n)]
    return build_chern_classes(law(p, n, D))


@pytest.fixture(params=CONFIGS, ids=lambda c: f"p{c[0]}n{c[1]}")
def config(request):
    return request.param
