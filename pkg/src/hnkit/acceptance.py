"""The numbered acceptance criteria as runnable checks.

Each ``criterion_k`` returns a ``CriterionResult``; ``run_all`` runs a
selection and ``scoreboard`` formats one line per criterion. The CLI
``selftest`` verb and the acceptance tests share these functions.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import catalog, conditions, kernels, symmetry
from .core import components, random_points
from .measures import QuadratureSpec, Separable, integrate
from .representation import (FunctionOracle, evaluate_many, oracle_from_data,
                             recover_a, recover_b, recover_c, recover_point_mass_1d,
                             slope_at_infinity_1d, stieltjes_inverse)

I = 1j
# Stieltjes inversion in three variables: the 1% target leaves room for a looser cubature
STIELTJES_SPEC = QuadratureSpec(rel_tol=1e-3)
STIELTJES_LADDER = (0.5, 0.25, 0.125, 0.0625)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d}. {self.title} ({self.seconds:.1f} s)"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title,
                "verdict": "pass" if self.passed else "fail",
                "seconds": self.seconds, "details": self.details}


def _rng(seed):
    return np.random.default_rng(seed)


def _max(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def criterion_1(seed: int = 0) -> CriterionResult:
    rng = _rng(seed)
    det, ok = {}, True
    for n in (1, 2, 3):
        data = catalog.get(f"const_i_{n}").data
        t0 = time.perf_counter()
        up = evaluate_many(data, random_points(rng, 10, n)).values
        other = [evaluate_many(data, random_points(rng, 10, n, signs=s)).values
                 for s in components(n)[1:]]
        dt = time.perf_counter() - t0
        e_up = _max(up - I)
        e_other = max(_max(v + I) for v in other)
        det[f"n={n}"] = {"upper_error": e_up, "other_error": e_other, "seconds": dt}
        ok &= e_up <= 1e-6 and e_other <= 1e-6 and dt < 60.0
    return CriterionResult(1, "constant-i reproduction", ok, det)


def criterion_2(seed: int = 0) -> CriterionResult:
    rng = _rng(seed)
    det = {}
    dens = catalog.get("nonadmissible_density")
    per = {}
    for s in components(2):
        Z = random_points(rng, 25, 2, signs=s)
        per[str(s)] = _max(evaluate_many(dens.data, Z).values - dens.closed_form(Z))
    det["density_components"] = per
    ok = max(per.values()) <= 1e-6
    three = catalog.get("three_var_inverse")
    Z = random_points(rng, 25, 3)
    det["three_var_error"] = _max(evaluate_many(three.data, Z).values - three.closed_form(Z))
    ok &= det["three_var_error"] <= 1e-5
    q = oracle_from_data(three.data)
    a = recover_a(q)
    bs = [recover_b(q, j).value for j in (1, 2, 3)]
    det["recover_a"], det["recover_b"] = a, bs
    ok &= abs(a - 1.0) <= 1e-6 and all(abs(b) <= 1e-4 for b in bs)
    return CriterionResult(2, "closed-form match and three-variable recovery", ok, det)


def criterion_3(seed: int = 0) -> CriterionResult:
    rng = _rng(seed)
    det = {}
    ok = True
    for n in range(1, 6):
        z = random_points(rng, 500, n)
        t = rng.normal(scale=3.0, size=(500, n))
        r = float(np.max(kernels.im_K_decomposition_residual(z, t)))
        det[f"n={n}"] = r
        ok &= r <= 1e-12
    z = random_points(rng, 500, 1)
    t = rng.normal(scale=3.0, size=(500, 1))
    imk = np.imag(kernels.K_raw(z, t))
    pois = kernels.poisson_raw(z, t)
    det["poisson_n1"] = float(np.max(np.abs(imk - pois) / (np.abs(pois) + 1.0)))
    ok &= det["poisson_n1"] <= 1e-14
    return CriterionResult(3, "kernel identity", ok, det)


def criterion_4(seed: int = 0) -> CriterionResult:
    meas = catalog.measures()
    det = {}
    verdicts = {}
    for key in ("lebesgue_2", "plane_3", "density_2"):
        rep = conditions.full_admissibility(meas[key], seed=seed)
        verdicts[key] = rep.verdict
        det[key] = "pass" if rep.verdict else "fail"
    oracle = math.pi ** 2 / 16
    mom = conditions.check_moment_form(meas["density_2"], (1, -1))
    r = mom.witnesses[0]["residual"]
    det["moment_(1,-1)"] = {"residual": r, "oracle": oracle, "difference": abs(r - oracle)}
    ok = (verdicts["lebesgue_2"] and verdicts["plane_3"] and not verdicts["density_2"]
          and abs(r - oracle) <= 1e-6)
    return CriterionResult(4, "condition discrimination", ok, det)


def criterion_5(seed: int = 0) -> CriterionResult:
    det = {}
    ok = True
    for key, mu in catalog.measures().items():
        prof = conditions.verdict_profile(mu)
        det[key] = prof
        ok &= len(set(prof.values())) == 1
    return CriterionResult(5, "form equivalence", ok, det)


def criterion_6(seed: int = 0) -> CriterionResult:
    det = {}
    ok = True
    for e in catalog.entries():
        # every query point of the recovery paths lies in the poly-upper half-plane
        if not e.admissible:
            continue
        q = FunctionOracle(e.closed_form, e.n)
        a = recover_a(q)
        b = [recover_b(q, j).value for j in range(1, e.n + 1)]
        c = [recover_c(q, j).value for j in range(1, e.n + 1)]
        err = max([abs(a - e.known["a"])]
                  + [abs(x - y) for x, y in zip(b, e.known["b"])]
                  + [abs(x - y) for x, y in zip(c, e.known["c"])])
        det[e.name] = {"a": a, "b": b, "c": c, "max_error": err}
        ok &= err <= 1e-4
    q = FunctionOracle(catalog.get("one_var_reciprocal").closed_form, 1)
    m0 = recover_point_mass_1d(q, 0.0).value
    m1 = recover_point_mass_1d(q, 1.0).value
    det["point_mass"] = {"t0=0": m0, "t0=1": m1}
    ok &= abs(m0 - math.pi) <= 1e-3 and abs(m1) <= 1e-3
    affine = FunctionOracle(lambda Z: 3.0 + 2.0 * Z[:, 0], 1)
    s = slope_at_infinity_1d(affine).value
    det["affine_slope"] = s
    ok &= abs(s - 2.0) <= 1e-6
    return CriterionResult(6, "recovery round trip", ok, det)


def _psi(x):
    return np.prod(1.0 / (1.0 + x * x), axis=-1)


def criterion_7(seed: int = 0) -> CriterionResult:
    det = {}
    c2 = catalog.get("const_i_2")
    v = stieltjes_inverse(FunctionOracle(c2.closed_form, 2), _psi).value
    det["const_i_2"] = {"value": v, "expected": math.pi ** 2,
                        "relative_error": abs(v / math.pi ** 2 - 1)}
    ok = det["const_i_2"]["relative_error"] <= 5e-3
    three = catalog.get("three_var_inverse")
    sep = Separable(((1.0, tuple((lambda s: 1.0 / (1.0 + s * s) + 0j) for _ in range(3))),), 3, 1)
    ref = float(np.real(np.atleast_1d(integrate(three.data.mu, sep).value)[0]))
    v = stieltjes_inverse(FunctionOracle(three.closed_form, 3), _psi, STIELTJES_LADDER,
                          STIELTJES_SPEC).value
    det["three_var_inverse"] = {"value": v, "hyperplane_oracle": ref, "relative_error": abs(v / ref - 1)}
    ok &= det["three_var_inverse"]["relative_error"] <= 1e-2
    return CriterionResult(7, "Stieltjes inversion", ok, det)


def _mixed_points(rng, count, n):
    """``count`` random points spread over every component."""
    comps = components(n)
    per = -(-count // len(comps))
    return np.concatenate([random_points(rng, per, n, signs=s) for s in comps])[:count]


def criterion_8(seed: int = 0, count: int = 100) -> CriterionResult:
    rng = _rng(seed)
    det = {}
    ok = True
    for e in catalog.entries():
        if e.n < 2:
            continue
        Z = _mixed_points(rng, count, e.n)
        row = {}
        if e.components is None:
            g = symmetry.symmetric_values_g(e.pure_form, Z)
            q = symmetry.symmetric_values_q(e.data, Z, g=e.pure_form)
            row["closed_g"] = _max(g - e.pure_form(Z))
            row["closed_q"] = _max(q - e.closed_form(Z))
            ok &= row["closed_g"] <= 1e-6 and row["closed_q"] <= 1e-6
        if e.admissible:
            direct = evaluate_many(e.data, Z).values
            row["quadrature_q"] = _max(symmetry.symmetric_values_q(e.data, Z) - direct)
            ok &= row["quadrature_q"] <= 1e-5
        det[e.name] = row
    # short circuit: any -i coordinate returns conj(g(i1)) with no other evaluation
    calls = []

    def g(P):
        calls.append(len(P))
        return catalog.get("nonadmissible_density").pure_form(P)

    z = np.array([-I, 0.3 + 2.0 * I])
    v = symmetry.symmetric_value_g(g, z)
    exact = v == np.conj(g(np.array([[I, I]]))[0]) and calls[0] == 1
    det["short_circuit_exact"] = bool(exact)
    ok &= exact
    return CriterionResult(8, "symmetry formulas", ok, det)


INDEPENDENCE_POINTS = {
    2: [(1.0 + 1.0j, 0.5 - 2.0j), (-2.0 - 0.7j, 1.5 + 0.3j)],
    3: [(1.0 + 1.0j, 0.5 - 2.0j, -1.0 + 0.7j), (0.2 - 1.5j, -0.8 + 2.0j, 1.1 - 0.4j)],
}


def criterion_9(seed: int = 0) -> CriterionResult:
    det = {}
    ok = True
    for e in catalog.entries():
        if e.n < 2:
            continue
        sens = []
        for z in INDEPENDENCE_POINTS[e.n]:
            rep = symmetry.check_cplus_independence(e.data, z)
            sens.append(rep.max_sensitivity)
        det[e.name] = max(sens)
        if e.admissible:
            ok &= max(sens) <= 1e-6
        else:
            ok &= max(sens) > 1e-2
    return CriterionResult(9, "upper-coordinate independence", ok, det)


def criterion_10(seed: int = 0) -> CriterionResult:
    rng = _rng(seed)
    det = {}
    ok = True
    for e in catalog.entries():
        if not e.admissible:
            continue
        Z = random_points(rng, 200, e.n)
        im_q = evaluate_many(e.data, Z).values.imag
        det[e.name] = float(np.min(im_q))
        ok &= det[e.name] >= -1e-8
    return CriterionResult(10, "Herglotz positivity", ok, det)


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run(number: int, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number](seed)
    res.seconds = time.perf_counter() - t0
    return res


def run_all(numbers=None, seed: int = 0, echo=None) -> list[CriterionResult]:
    out = []
    for k in numbers or sorted(CRITERIA):
        res = run(k, seed)
        if echo:
            echo(res.line())
        out.append(res)
    return out


def scoreboard(results) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)
