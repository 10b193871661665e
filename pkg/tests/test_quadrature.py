import math

import numpy as np
import pytest

from hnkit.quadrature import adaptive_cubature, rule_1d


@pytest.mark.parametrize("order", [7, 15])
def test_rules_integrate_polynomials(order):
    r = rule_1d(order)
    deg = 3 * (len(r.nodes) // 2) + 1
    for p in range(deg + 1):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        assert abs(np.sum(r.kronrod * r.nodes**p) - exact) <= 1e-14


def test_rule_rejects_unknown_order():
    with pytest.raises(ValueError):
        rule_1d(21)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gaussian_box(k):
    res = adaptive_cubature(lambda x: np.exp(-np.sum(x * x, axis=1)), [-6] * k, [6] * k,
                            rel_tol=1e-10)
    assert res.converged
    assert abs(res.value[0] - math.pi ** (k / 2)) <= 1e-9


def test_vector_valued_and_complex():
    def f(x):
        s = x[:, 0]
        return np.stack([np.cos(s), 1j * np.sin(s) ** 2], axis=1)

    res = adaptive_cubature(f, [0.0], [math.pi], rel_tol=1e-12)
    assert np.allclose(res.value, [0.0, 1j * math.pi / 2], atol=1e-12)


def test_peaked_integrand_refines():
    eps = 1e-3
    res = adaptive_cubature(lambda x: eps / (x[:, 0] ** 2 + eps**2), [-1.0], [1.0], rel_tol=1e-10)
    assert abs(res.value[0] - 2 * math.atan(1 / eps)) <= 1e-8
    assert res.panels > 4


def test_panel_cap_reports_nonconvergence():
    res = adaptive_cubature(lambda x: np.abs(x[:, 0]) ** -0.5, [-1.0], [1.0], rel_tol=1e-14,
                            max_panels=8)
    assert not res.converged


def test_deterministic():
    f = lambda x: np.sin(5 * x[:, 0]) * np.exp(x[:, 1])
    a = adaptive_cubature(f, [0, 0], [1, 1])
    b = adaptive_cubature(f, [0, 0], [1, 1])
    assert np.array_equal(a.value, b.value) and a.panels == b.panels
