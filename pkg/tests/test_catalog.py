import numpy as np
import pytest

from hnkit import catalog
from hnkit.core import components, random_points
from hnkit.representation import evaluate_im_q_many, evaluate_many

ENTRIES = catalog.entries()


def test_names_are_unique_and_complete():
    names = [e.name for e in ENTRIES]
    assert len(set(names)) == len(names)
    for required in ("const_i_1", "const_i_2", "const_i_3", "three_var_inverse",
                     "two_var_shifted", "nonadmissible_density", "one_var_reciprocal"):
        assert required in names
    with pytest.raises(KeyError):
        catalog.get("nope")


def test_examples():
    assert catalog.get("const_i_2").closed_form([[1j, 2j]])[0] == 1j
    z1, z2 = 0.3 + 1.1j, -0.8 + 0.4j
    g = catalog.get("nonadmissible_density").pure_form([[z1, z2]])[0]
    assert abs(g + (7j + z1 + z2 + 1j * z1 * z2) / (8 * (z1 + 1j) * (z2 + 1j))) <= 1e-14
    w1, w2 = np.conj(z1), np.conj(z2)
    q0 = catalog.get("two_var_shifted").pure_form([[w1, w2]])[0]
    assert abs(q0 - (1 / (1j - w1) + 1 / (1j - w2) + 1 / (w1 + w2))) <= 1e-14
    g = catalog.get("nonadmissible_density").pure_form([[w1, z2]])[0]
    expected = -(5j + w1 + 3 * z2 + 1j * w1 * z2) / (8 * (w1 - 1j) * (z2 + 1j))
    assert abs(g - expected) <= 1e-14


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_closed_forms_match_quadrature(entry, rng):
    for signs in components(entry.n):
        if not entry.covers(signs):
            continue
        Z = random_points(rng, 10, entry.n, signs=signs)
        err = np.max(np.abs(evaluate_many(entry.data, Z).values - entry.closed_form(Z)))
        assert err <= 1e-6, signs


def test_three_var_imaginary_part(rng):
    data = catalog.get("three_var_inverse").data
    Z = random_points(rng, 10, 3)
    s = Z.sum(axis=1)
    expected = Z.imag.sum(axis=1) / np.abs(s) ** 2
    assert np.max(np.abs(evaluate_im_q_many(data, Z).values - expected)) <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lower", [False, True])
def test_residue_cascade(rng, n, lower):
    for _ in range(3):
        z = rng.uniform(-2, 2, n) + 1j * rng.uniform(0.3, 3, n)
        if lower:
            z[0] = np.conj(z[0])
        rep = catalog.residue_cascade_check(n, z, rng.normal(size=n - 1))
        assert rep.residual <= 1e-7
        assert rep.branch == ("lower" if lower else "upper")


def test_cascade_base_case():
    rep = catalog.residue_cascade_check(1, [1j])
    assert abs(rep.integral - np.pi * 1j) <= 1e-8


def test_dump_is_json_ready():
    import json
    for e in ENTRIES:
        json.dumps(e.to_json())
