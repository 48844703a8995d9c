from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from chainmeasures import new_kernel

TWO_STATE = [["0.6", "0.4"], ["0.2", "0.8"]]
CYCLE3 = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
LEAKY = [["0.5", "0.25"], [0, 1]]
TWO_BLOCKS = [["0.5", "0.5", 0, 0],
              ["0.5", "0.5", 0, 0],
              [0, 0, "0.3", "0.7"],
              [0, 0, "0.7", "0.3"]]
FEEDER = [["0.2", "0.4", "0.4"], [0, 1, 0], [0, 0, 1]]


@pytest.fixture
def two_state():
    return new_kernel(TWO_STATE, exact=True)


@pytest.fixture
def cycle3():
    return new_kernel(CYCLE3, exact=True)


@pytest.fixture
def two_blocks():
    return new_kernel(TWO_BLOCKS, exact=True)


def frac_vec(*xs):
    return np.array([Fraction(x) for x in xs], dtype=object)


@st.composite
def substochastic_rows(draw, n=None, conservative=False, max_n=5):
    """Rational row-substochastic matrices with small denominators."""
    if n is None:
        n = draw(st.integers(1, max_n))
    rows = []
    for _ in range(n):
        w = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
        if sum(w) == 0:
            w[draw(st.integers(0, n - 1))] = 1
        scale = 1 if conservative else draw(st.sampled_from([1, 1, Fraction(1, 2), Fraction(3, 4)]))
        rows.append([Fraction(v, sum(w)) * scale for v in w])
    return rows


@st.composite
def probability_vectors(draw, n):
    w = draw(st.lists(st.integers(0, 9), min_size=n, max_size=n))
    if sum(w) == 0:
        w[draw(st.integers(0, n - 1))] = 1
    return [Fraction(v, sum(w)) for v in w]
