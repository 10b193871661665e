import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnkit import kernels
from hnkit.core import DomainError

from conftest import off_real, upper


def _pts(rng, m, n, lower=False):
    y = rng.uniform(0.1, 4, (m, n))
    if lower:
        y *= rng.choice([-1, 1], (m, n))
    return rng.uniform(-4, 4, (m, n)) + 1j * y


def test_k0_is_i():
    assert kernels.eval_K((), ()) == 1j


@given(off_real(), st.floats(-50, 50))
def test_k1_equals_nevanlinna_kernel(z, t):
    expected = 1 / (t - z) - t / (1 + t * t)
    assert abs(kernels.eval_K([z], [t]) - expected) <= 1e-12 * (1 + abs(expected))


@given(upper(), st.floats(-50, 50))
def test_poisson_is_imaginary_part_in_one_variable(z, t):
    k = kernels.eval_K([z], [t])
    p = kernels.eval_poisson([z], [t])
    assert abs(k.imag - p) <= 1e-13 * (1 + p)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_decomposition_residual(rng, n):
    z = _pts(rng, 300, n)
    t = rng.normal(scale=3, size=(300, n))
    assert np.max(kernels.im_K_decomposition_residual(z, t)) <= 1e-12


@given(off_real(), st.floats(-20, 20))
def test_one_variable_kernel_is_real_symmetric(z, t):
    assert abs(kernels.eval_K([np.conj(z)], [t]) - np.conj(kernels.eval_K([z], [t]))) <= 1e-12


def test_factor_identities(rng):
    z = _pts(rng, 100, 1)[:, 0]
    t = rng.normal(size=100)
    assert np.allclose(kernels.eval_N(-1, z, t), 1 / (t - z) - 1 / (t - 1j))
    assert np.allclose(kernels.eval_N(0, z, t), 1 / (t - 1j) - 1 / (t + 1j))
    assert np.allclose(kernels.eval_N(1, z, t), 1 / (t + 1j) - 1 / (t - np.conj(z)))
    assert np.allclose(kernels.kernel_factors(z, t), 1 / (t - z) - 1 / (t + 1j))


def test_domain_errors():
    with pytest.raises(DomainError):
        kernels.eval_K([1.0], [0.0])
    with pytest.raises(DomainError):
        kernels.eval_poisson([-1j], [0.0])
    with pytest.raises(DomainError):
        kernels.eval_N(2, 1j, 0.0)
    with pytest.raises(DomainError):
        kernels.eval_K([1j, 1j], [0.0])


@settings(max_examples=50)
@given(upper())
def test_cayley_roundtrip(z):
    w = kernels.cayley(z)
    assert abs(w) < 1
    assert abs(kernels.inverse_cayley(w) - z) <= 1e-9 * (1 + abs(z))


def test_boundary_angle_range():
    t = np.linspace(-100, 100, 101)
    s = kernels.boundary_angle(t)
    assert np.all((s >= 0) & (s < 2 * np.pi))
    assert np.allclose(np.exp(1j * s), (t - 1j) / (t + 1j))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_bound(rng, n):
    z = _pts(rng, 20, n)
    t = rng.normal(scale=10, size=(20, n))
    for zi in z:
        c = kernels.kernel_bound_constant(zi)
        lhs = np.abs(kernels.K_raw(zi[None, :], t)) * np.prod(1 + t * t, axis=-1)
        assert np.all(lhs <= c * (1 + 1e-12))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_is_holomorphic_in_each_coordinate(rng, n):
    h = 1e-5
    z = _pts(rng, 30, n, lower=True)
    t = rng.normal(scale=2, size=(30, n))
    for ell in range(n):
        e = np.zeros(n)
        e[ell] = 1.0
        dx = (kernels.K_raw(z + h * e, t) - kernels.K_raw(z - h * e, t)) / (2 * h)
        dy = (kernels.K_raw(z + 1j * h * e, t) - kernels.K_raw(z - 1j * h * e, t)) / (2 * h)
        assert np.max(np.abs(dy - 1j * dx)) <= 1e-6


@settings(max_examples=50)
@given(upper(1e-3, 10.0), st.floats(-1e6, 1e6))
def test_poisson_positive(z, t):
    assert kernels.eval_poisson([z], [t]) > 0


@pytest.mark.parametrize("n", [1, 2])
def test_kernel_bound_far_out(rng, n):
    z = _pts(rng, 5, n, lower=True)
    t = np.sign(rng.normal(size=(200, n))) * 10.0 ** rng.uniform(0, 6, (200, n))
    for zi in z:
        c = kernels.kernel_bound_constant(zi)
        lhs = np.abs(kernels.K_raw(zi[None, :], t)) * np.prod(1 + t * t, axis=-1)
        assert np.all(lhs <= c * (1 + 1e-10))
