import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnkit import catalog
from hnkit.core import DomainError, NoConvergence, NonTangentialPath, PreconditionError
from hnkit.measures import PointMass, lebesgue
from hnkit.representation import (DATA_SCHEMA, FunctionOracle, RepresentationData,
                                  constancy_check, evaluate_im_q, evaluate_im_q_many,
                                  evaluate_many, evaluate_q, evaluate_q_extended,
                                  nevanlinna_integral_1d, oracle_from_data, recover_a, recover_b,
                                  recover_c, recover_point_mass_1d, slope_at_infinity_1d,
                                  stieltjes_inverse)

from conftest import upper


def test_data_validation():
    with pytest.raises(DomainError):
        RepresentationData(0.0, (-1.0,), lebesgue(1))
    with pytest.raises(DomainError):
        RepresentationData(0.0, (0.0, 0.0), lebesgue(1))


def test_data_json_roundtrip():
    d = catalog.get("two_var_shifted").data
    obj = json.loads(json.dumps(d.to_json()))
    jsonschema.validate(obj, DATA_SCHEMA)
    assert RepresentationData.from_json(obj).to_json() == obj


@pytest.mark.parametrize("n", [1, 2, 3])
def test_constant_i(rng, n):
    data = catalog.get(f"const_i_{n}").data
    z = rng.uniform(-2, 2, n) + 1j * rng.uniform(0.5, 3, n)
    assert abs(evaluate_q(data, z) - 1j) <= 1e-8
    zc = z.copy()
    zc[0] = np.conj(zc[0])
    assert abs(evaluate_q_extended(data, zc) + 1j) <= 1e-8


def test_evaluate_q_rejects_lower_points():
    with pytest.raises(DomainError):
        evaluate_q(catalog.get("const_i_2").data, [1j, -1j])
    with pytest.raises(DomainError):
        evaluate_many(catalog.get("const_i_1").data, [[2.0]])


def test_three_var_value_at_i():
    q = evaluate_q(catalog.get("three_var_inverse").data, [1j, 1j, 1j])
    assert abs(q - (1 + 1j / 3)) <= 1e-8


def test_affine_part():
    data = RepresentationData(1.5, (2.0,), PointMass((0.0,), math.pi))
    assert abs(evaluate_q(data, 2j) - (1.5 + 4j - 1 / 2j)) <= 1e-14


@settings(max_examples=20, deadline=None)
@given(upper(0.3, 3.0), upper(0.3, 3.0))
def test_poisson_matches_imaginary_part(z1, z2):
    data = catalog.get("two_var_shifted").data
    z = np.array([z1, z2])
    assert abs(evaluate_im_q(data, z) - evaluate_q(data, z).imag) <= 1e-8


def test_poisson_rejects_lower_points():
    with pytest.raises(DomainError):
        evaluate_im_q_many(catalog.get("const_i_2").data, [[1j, -1j]])


def test_oracle_flags_negative_imaginary_part():
    q = FunctionOracle(lambda Z: -Z[:, 0], 1)
    with pytest.raises(PreconditionError):
        q(1j)
    # lower points are not checked
    assert q(-1j) == 1j


def test_recover_from_quadrature_oracle():
    data = catalog.get("two_var_shifted").data
    q = oracle_from_data(data)
    assert abs(recover_a(q)) <= 1e-6
    assert abs(recover_b(q, 2).value - 2.0) <= 1e-4
    assert abs(recover_b(q, 1).value) <= 1e-4


def test_recover_c_and_point_mass():
    q = FunctionOracle(catalog.get("one_var_reciprocal").closed_form, 1)
    assert abs(recover_c(q, 1).value + 1.0) <= 1e-6
    assert abs(recover_point_mass_1d(q, 0.0).value - math.pi) <= 1e-6
    assert abs(recover_point_mass_1d(q, 1.0).value) <= 1e-6


@given(st.floats(0.0, 5.0), st.floats(-5, 5))
def test_slope_of_affine_oracle(b, a):
    q = FunctionOracle(lambda Z: a + b * Z[:, 0], 1)
    assert abs(slope_at_infinity_1d(q).value - b) <= 1e-6 * (1 + b)


def test_recovery_path_checks():
    q = FunctionOracle(lambda Z: Z[:, 0], 1)
    with pytest.raises(PreconditionError):
        recover_b(q, 1, NonTangentialPath.to_point(0.0))
    with pytest.raises(PreconditionError):
        recover_c(q, 1, NonTangentialPath.to_infinity())
    with pytest.raises(PreconditionError):
        recover_point_mass_1d(FunctionOracle(lambda Z: Z[:, 0], 2), 0.0)


def test_recover_b_clamps_small_negative_slopes():
    q = FunctionOracle(lambda Z: -1e-9 * Z[:, 0] + 1j, 1)
    rec = recover_b(q, 1)
    assert rec.value == 0.0 and rec.warnings


def test_recover_c_diverging_limit_raises():
    q = FunctionOracle(lambda Z: 1j / np.abs(Z[:, 0]) ** 2, 1)
    with pytest.raises(NoConvergence):
        recover_c(q, 1)


def test_stieltjes_constant_i():
    q = FunctionOracle(catalog.get("const_i_2").closed_form, 2)
    rec = stieltjes_inverse(q, lambda x: np.prod(1 / (1 + x * x), axis=-1))
    assert abs(rec.value - math.pi**2) <= 5e-3 * math.pi**2


def test_stieltjes_point_mass():
    # -1/z has the atom pi at 0; psi(0) = 1
    q = FunctionOracle(catalog.get("one_var_reciprocal").closed_form, 1)
    rec = stieltjes_inverse(q, lambda x: 1 / (1 + x[:, 0] ** 2))
    assert abs(rec.value - math.pi) <= 1e-2 * math.pi


def test_stieltjes_ladder_validation():
    q = FunctionOracle(catalog.get("const_i_1").closed_form, 1)
    with pytest.raises(DomainError):
        stieltjes_inverse(q, lambda x: x[:, 0], y_ladder=(0.1, 0.2, 0.3))


def test_constancy_check():
    const = FunctionOracle(lambda Z: np.full(len(Z), 2.0 + 0j), 2)
    v = constancy_check(const, [1j, 1j])
    assert v.applicable and v.constant
    herglotz = FunctionOracle(catalog.get("const_i_2").closed_form, 2)
    assert not constancy_check(herglotz, [1j, 1j]).applicable


@given(upper(0.2, 4.0))
def test_one_variable_integral_form(z):
    mu = PointMass((0.5,), 2.0)
    direct = nevanlinna_integral_1d(mu, z)
    expected = 2.0 * (1 / (0.5 - z) - 0.5 / 1.25)
    assert abs(direct - expected) <= 1e-12 * (1 + abs(expected))
