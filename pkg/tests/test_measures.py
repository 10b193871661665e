import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnkit import integrands
from hnkit.core import DomainError, NotConverged
from hnkit.measures import (MEASURE_SCHEMA, HyperplaneLebesgue, LebesgueDensity, PointMass,
                            QuadratureSpec, Scaled, Separable, Sum, TorusMeasure, growth_norm,
                            integrate, lebesgue, measure_from_json, zero_measure)


def _inv_sq_product(k):
    return Separable(((1.0, tuple((lambda s: 1.0 / (1.0 + s * s) + 0j) for _ in range(k))),), k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lebesgue_growth_norm(k):
    assert abs(growth_norm(lebesgue(k)) - math.pi**k) <= 1e-8 * math.pi**k


def test_density_growth_norm():
    # int 1/(1+t^2)^2 = pi/2 per axis
    assert abs(growth_norm(LebesgueDensity(2, "inv_one_plus_t2_product")) - math.pi**2 / 4) <= 1e-9


def test_callable_density_matches_registry():
    named = LebesgueDensity(2, "inv_one_plus_t2_product")
    func = LebesgueDensity(2, lambda t: np.prod(1 / (1 + t * t), axis=-1))
    f = lambda t: np.exp(-np.sum(t * t, axis=1))
    a = integrate(named, f).value
    b = integrate(func, f).value
    assert abs(a - b) <= 1e-8


def test_hyperplane_line_integral():
    # pi * line t1 + t2 = 0, weight 1/|normal|^... against prod 1/(1+t^2): pi * int dt/(1+t^2)^2
    mu = HyperplaneLebesgue((1.0, 1.0), 0.0, math.pi)
    res = integrate(mu, _inv_sq_product(2))
    assert abs(res.value - math.pi * math.pi / 2) <= 1e-9


@pytest.mark.parametrize("normal, offset", [((1.0, 2.0), 0.5), ((2.0, -1.0, 1.0), 0.0),
                                            ((0.0, 1.0), 1.0)])
def test_hyperplane_matches_direct_parametrization(normal, offset):
    mu = HyperplaneLebesgue(normal, offset, 1.0)
    f = lambda t: np.exp(-np.sum(t * t, axis=1))
    val = integrate(mu, f).value
    nrm = np.asarray(normal)
    # Gaussian restricted to the plane: exp(-d^2) * pi^{(n-1)/2} / |normal|
    d = offset / np.linalg.norm(nrm)
    n = len(normal)
    expected = math.exp(-d * d) * math.pi ** ((n - 1) / 2) / np.linalg.norm(nrm)
    assert abs(val - expected) <= 1e-8


def test_hyperplane_validation():
    with pytest.raises(DomainError):
        HyperplaneLebesgue((0.0, 0.0))
    with pytest.raises(DomainError):
        HyperplaneLebesgue((1.0,), scale=-1.0)


def test_one_dimensional_hyperplane_is_an_atom():
    mu = HyperplaneLebesgue((2.0,), 1.0, 3.0)
    v = integrate(mu, lambda t: t[:, 0] ** 2).value
    assert abs(v - 1.5 * 0.25) <= 1e-15


def test_point_mass_scaled_and_sum():
    a = PointMass((1.0, 2.0), 2.0)
    b = PointMass((0.0, 0.0), 1.0)
    mu = Sum((Scaled(3.0, a), b))
    v = integrate(mu, lambda t: t[:, 0] + t[:, 1]).value
    assert v == pytest.approx(18.0)
    assert [x.weight for x in mu.atoms()] == [6.0, 1.0]
    assert Scaled(0.0, a).is_zero()
    assert zero_measure(2).is_zero()
    assert integrate(zero_measure(2), lambda t: t[:, 0]).value == 0


def test_measure_algebra_operators():
    mu = 2 * PointMass((0.0,), 1.0) + PointMass((1.0,), 1.0)
    assert integrate(mu, lambda t: 1 + t[:, 0]).value == pytest.approx(4.0)


def test_vector_valued_fubini_matches_pointwise():
    Z = np.array([[1 + 1j, -0.5 + 2j], [0.3 + 0.7j, 2 + 1j]])
    mu = LebesgueDensity(2, "inv_one_plus_t2_product")
    vec = integrate(mu, integrands.kernel(Z)).value
    for r in range(2):
        one = integrate(mu, integrands.kernel(Z[r:r + 1])).value
        assert abs(vec[r] - one[0]) <= 1e-10


@pytest.mark.parametrize("mu", [
    lebesgue(2), LebesgueDensity(1, "inv_one_plus_t2_product"),
    HyperplaneLebesgue((1.0, 1.0, 1.0), 0.0, math.pi), PointMass((0.0, 1.0), 2.0),
    Scaled(2.0, lebesgue(1)), Sum((lebesgue(1), PointMass((0.5,), 1.0))),
])
def test_json_roundtrip_and_schema(mu):
    obj = json.loads(json.dumps(mu.to_json()))
    jsonschema.validate(obj, MEASURE_SCHEMA)
    back = measure_from_json(obj)
    assert back.to_json() == mu.to_json()


def test_schema_rejects_unknown_type():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"type": "gaussian", "k": 1}, MEASURE_SCHEMA)
    with pytest.raises(DomainError):
        measure_from_json({"type": "gaussian"})


def test_growth_norm_raises_when_panels_run_out():
    mu = LebesgueDensity(1, lambda t: 1.0 / np.sqrt(np.abs(t[:, 0]) + 1e-300))
    with pytest.raises(NotConverged):
        growth_norm(mu, QuadratureSpec(rel_tol=1e-14, abs_tol=1e-16, max_panels=16))


@pytest.mark.parametrize("mu", [lebesgue(2), HyperplaneLebesgue((1.0, 1.0), 0.0, math.pi)])
def test_torus_total_mass(mu):
    nu = TorusMeasure(mu)
    one = integrands.torus_characters(np.zeros((1, 2), dtype=int))
    assert abs(nu.integrate(one).value[0] - nu.total_mass()) <= 1e-7 * nu.total_mass()


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-2.0, 2.0))
def test_hyperplane_scale_is_linear(scale, offset):
    f = _inv_sq_product(2)
    base = integrate(HyperplaneLebesgue((1.0, -1.0), offset, 1.0), f).value
    scaled = integrate(HyperplaneLebesgue((1.0, -1.0), offset, scale), f).value
    assert abs(scaled - scale * base) <= 1e-9 * (1 + abs(scaled))


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0)
    assert QuadratureSpec().panels_for(2) == 10**6
    assert QuadratureSpec().panels_for(3) == 10**7
    assert QuadratureSpec(max_panels=5).replace(rel_tol=1e-3).max_panels == 5


@pytest.mark.parametrize("key", ["lebesgue_2", "density_2", "line_2", "plane_3", "lebesgue_3"])
def test_growth_norm_stable_under_panel_doubling(key):
    from hnkit import catalog
    mu = catalog.measures()[key]
    spec = QuadratureSpec()
    a = growth_norm(mu, spec)
    b = growth_norm(mu, spec.replace(max_panels=2 * spec.panels_for(mu.dim)))
    assert abs(a - b) <= spec.rel_tol * abs(a)
