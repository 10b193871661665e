import numpy as np
import pytest
from hypothesis import given, strategies as st

from hnkit.core import NoConvergence
from hnkit.extrapolation import neville_tableau, richardson


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_exact_for_quadratics(a, b, c):
    h = 2.0 ** -np.arange(1, 6)
    rep = richardson(h, a + b * h + c * h * h)
    assert abs(rep.value - a) <= 1e-9 * (1 + abs(a) + abs(b) + abs(c))


def test_geometric_ladder_one_over_y():
    y = 2.0 ** np.arange(3, 13)
    f = 2.0 + 3.0 / y + 1.0 / (y * y + 1.0)
    rep = richardson(1.0 / y, f)
    assert abs(rep.value - 2.0) <= 1e-8
    assert rep.converged and rep.error_estimate <= 1e-6


def test_tableau_shape():
    tab = neville_tableau([1.0, 0.5, 0.25], [1.0, 2.0, 3.0], max_order=1)
    assert [len(r) for r in tab] == [1, 2, 2]


def test_unsorted_input_is_sorted():
    h = np.array([0.125, 0.5, 0.25, 1.0])
    rep = richardson(h, 1.0 + h)
    assert abs(rep.value - 1.0) <= 1e-12


def test_divergent_sequence_raises():
    h = 2.0 ** -np.arange(1, 8)
    with pytest.raises(NoConvergence) as info:
        richardson(h, np.sin(1.0 / h) / h, tol=1e-6)
    assert info.value.report is not None


def test_needs_three_samples():
    with pytest.raises(ValueError):
        richardson([1.0, 0.5], [1.0, 1.0])
