import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnkit import catalog
from hnkit.core import DomainError, IndexSet, OffRealPoint, PreconditionError, classify
from hnkit.representation import evaluate_many, evaluate_q
from hnkit.symmetry import (ReflectionSpec, check_cplus_independence, closed_form_sensitivity,
                            psi_map, reflection_subsets, symmetric_value_g, symmetric_value_q,
                            symmetric_values_g, symmetric_values_q)

from conftest import off_real


def test_psi_map():
    z = OffRealPoint((1 + 2j, 3 - 1j, 1j))
    out = psi_map(ReflectionSpec(z, IndexSet(3, [2])))
    assert out.coords == (1j, 3 + 1j, 1j)


def test_reflection_spec_rejects_i_coordinates():
    with pytest.raises(DomainError):
        ReflectionSpec(OffRealPoint((1j, 2j)), IndexSet(2, [1]))


def test_subsets_cover_free_coordinates():
    subs = reflection_subsets(classify([2j, 1j, 1 - 1j]))
    assert len(subs) == 4 and () in subs and (1, 3) in subs


def test_short_circuit_is_exact():
    g = catalog.get("nonadmissible_density").pure_form
    v = symmetric_value_g(g, [-1j, 0.4 + 2j])
    assert v == np.conj(g(np.array([[1j, 1j]]))[0])


PURE = [e for e in catalog.entries() if e.components is None]


@pytest.mark.parametrize("entry", PURE, ids=lambda e: e.name)
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_g_formula_matches_closed_forms(entry, data):
    z = np.array([data.draw(off_real(0.2, 4.0)) for _ in range(entry.n)])
    lhs = symmetric_value_g(entry.pure_form, z)
    assert abs(lhs - entry.pure_form(z[None, :])[0]) <= 1e-9


@pytest.mark.parametrize("entry", PURE, ids=lambda e: e.name)
def test_q_formula_matches_closed_forms(rng, entry):
    Z = rng.uniform(-3, 3, (40, entry.n)) + 1j * rng.uniform(0.5, 3, (40, entry.n)) \
        * rng.choice([-1, 1], (40, entry.n))
    q = symmetric_values_q(entry.data, Z, g=entry.pure_form)
    assert np.max(np.abs(q - entry.closed_form(Z))) <= 1e-9


def test_worked_mixed_identity():
    # q(z1, conj z2) = 2 conj z2 + conj q0(i, z2) + conj q0(conj z1, i) - conj q0(conj z1, z2)
    e = catalog.get("two_var_shifted")
    q0 = e.pure_form
    z1, z2 = 0.7 + 1.3j, -0.4 + 0.6j
    rhs = (2 * np.conj(z2) + np.conj(q0([[1j, z2]])[0]) + np.conj(q0([[np.conj(z1), 1j]])[0])
           - np.conj(q0([[np.conj(z1), z2]])[0]))
    assert abs(e.closed_form([[z1, np.conj(z2)]])[0] - rhs) <= 1e-12


def test_q_formula_with_quadrature_in_three_variables(rng):
    data = catalog.get("three_var_inverse").data
    Z = np.array([[1 + 1j, 0.5 - 2j, -1 + 0.7j], [-0.3 - 1j, 2 - 0.5j, 0.1 + 1.5j]])
    assert np.max(np.abs(symmetric_values_q(data, Z) - evaluate_many(data, Z).values)) <= 1e-6


@given(off_real(0.2, 4.0))
def test_one_variable_reflection(z):
    data = catalog.get("one_var_reciprocal").data
    up = z if z.imag > 0 else np.conj(z)
    assert abs(symmetric_value_q(data, [np.conj(up)]) - np.conj(evaluate_q(data, [up]))) <= 1e-10


def test_lebesgue_is_minus_i_off_the_upper_component():
    g = catalog.get("const_i_3").pure_form
    Z = np.array([[1j, -2j, 3 + 1j], [1 - 1j, -1 - 1j, 2 - 3j]])
    assert np.allclose(symmetric_values_g(g, Z), -1j)


@pytest.mark.parametrize("name", ["const_i_2", "const_i_3", "two_var_shifted", "three_var_inverse"])
def test_independence_for_admissible_data(name):
    data = catalog.get(name).data
    z = [1 + 1j, 0.5 - 2j, -1 + 0.7j][:data.n]
    rep = check_cplus_independence(data, z, perturbations=[0.2, 0.5j])
    assert rep.verdict and rep.max_sensitivity <= 1e-6
    assert rep.as_dict()["verdict"] == "pass"


def test_dependence_for_density():
    e = catalog.get("nonadmissible_density")
    z = [1 + 1j, 0.5 - 2j]
    rep = check_cplus_independence(e.data, z)
    assert not rep.verdict and rep.max_sensitivity > 1e-2
    cf = closed_form_sensitivity(e.pure_form, z)
    assert abs(cf[1] - rep.derivatives[1]) <= 1e-6


def test_independence_needs_a_lower_coordinate():
    with pytest.raises(PreconditionError):
        check_cplus_independence(catalog.get("const_i_2").data, [1j, 2j])


def test_perturbation_must_stay_upper():
    with pytest.raises(DomainError):
        check_cplus_independence(catalog.get("const_i_2").data, [1 + 0.5j, -1j],
                                 perturbations=[-1j])
