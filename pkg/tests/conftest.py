import numpy as np
import pytest
from hypothesis import strategies as st

from hnkit.measures import QuadratureSpec


def off_real(min_im=0.1, max_im=5.0, lower=True):
    """Strategy for complex numbers away from the real axis."""
    re = st.floats(-5.0, 5.0, allow_nan=False)
    im = st.floats(min_im, max_im, allow_nan=False)
    sign = st.sampled_from((1.0, -1.0)) if lower else st.just(1.0)
    return st.builds(lambda x, y, s: complex(x, s * y), re, im, sign)


def upper(min_im=0.1, max_im=5.0):
    return off_real(min_im, max_im, lower=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def loose_spec():
    return QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10)
