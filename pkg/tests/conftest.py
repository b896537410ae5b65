from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("pcl", max_examples=40, deadline=None)
settings.load_profile("pcl")


def rationals(bound=60):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, bound))


def int_triples(bound=60):
    return st.tuples(*(st.integers(-bound, bound) for _ in range(3))).filter(any)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
