import math
from itertools import product

import numpy as np
import pytest
from hypothesis import strategies as st

from iit.setfun import JointDistribution


def direct_entropy(alphabet_sizes, pmf, coords):
    """Independent oracle: marginalise by looping over every cell, then
    sum -p ln p. ``coords`` are 1-based."""
    marg = {}
    for flat, idx in enumerate(product(*[range(a) for a in alphabet_sizes])):
        key = tuple(idx[i - 1] for i in sorted(coords))
        marg[key] = marg.get(key, 0.0) + pmf[flat]
    return -sum(p * math.log(p) for p in marg.values() if p > 0)


@st.composite
def pmfs(draw, max_n=4, max_alphabet=3):
    n = draw(st.integers(1, max_n))
    sizes = tuple(draw(st.integers(1, max_alphabet)) for _ in range(n))
    cells = math.prod(sizes)
    w = draw(st.lists(st.floats(0, 1), min_size=cells, max_size=cells))
    w = np.array(w)
    if w.sum() <= 1e-6:
        w = np.ones(cells)
    return JointDistribution(sizes, w / w.sum())


@pytest.fixture
def skewed():
    return JointDistribution((2, 2), [0.5, 0.25, 0.125, 0.125])


@pytest.fixture
def correlated():
    return JointDistribution((2, 2), [0.5, 0, 0, 0.5])


@pytest.fixture
def independent():
    return JointDistribution((2, 2), [0.25] * 4)
