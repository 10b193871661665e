"""Finite certificates for the growth and Nevanlinna conditions on a measure.

The Nevanlinna condition quantifies over every point of the poly-upper
half-plane (or every admissible multi-index); a check here evaluates it on a
fixed, documented witness set. A witness fails only when its residual exceeds
the tolerance plus its own quadrature error estimate, so quadrature noise
alone never produces a failing verdict.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import integrands
from .core import (NotConverged, PreconditionError, RhoVector, enumerate_admissible_rho,
                   ordered_map)
from .measures import (DEFAULT_SPEC, Measure, QuadratureSpec, growth_integral, integrate,
                       transform_to_torus)

FORMS = ("growth", "sum_a", "per_rho_b", "moment_c", "pluriharmonic_d", "torus")
DEFAULT_SAMPLES = 16
DEFAULT_SEED = 0
DEFAULT_DEGREE = 3
REL_TOLERANCE = 1e-6
# quadrature absolute accuracy requested, as a fraction of the verdict tolerance
QUAD_FRACTION = 1e-3


def _complex_pair(c) -> list:
    return [float(np.real(c)), float(np.imag(c))]


@dataclass(frozen=True)
class MomentIndex:
    """Integer multi-index ``m``; admissible when it has entries of both signs."""

    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def admissible(self) -> bool:
        return any(x > 0 for x in self.m) and any(x < 0 for x in self.m)


def admissible_moments(n: int, cutoff: int = DEFAULT_DEGREE) -> list[MomentIndex]:
    """All admissible ``m`` with ``|m_l| <= cutoff``, lexicographically."""
    rng = range(-cutoff, cutoff + 1)
    return [MomentIndex(m) for m in itertools.product(rng, repeat=n)
            if MomentIndex(m).admissible]


@dataclass
class ConditionReport:
    """Residuals of one condition form over its witnesses.

    ``verdict`` is true when every witness satisfies
    ``residual <= tolerance + error_estimate``.
    """

    form: str
    witnesses: list
    tolerance: float
    notes: list = field(default_factory=list)

    @property
    def residuals(self) -> list[tuple]:
        return [(w["witness"], w["residual"]) for w in self.witnesses]

    @property
    def max_residual(self) -> float:
        return max((w["residual"] for w in self.witnesses), default=0.0)

    @property
    def verdict(self) -> bool:
        return all(w["passed"] for w in self.witnesses)

    def as_dict(self) -> dict:
        return {
            "form": self.form,
            "witnesses": [
                {w["kind"]: w["witness"], "residual": w["residual"],
                 "error_estimate": w["error_estimate"], "passed": w["passed"]}
                for w in self.witnesses
            ],
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.verdict else "fail",
            "notes": list(self.notes),
        }


def _witness(kind, label, residual, error, tol):
    residual = float(residual)
    error = float(error)
    return {"kind": kind, "witness": label, "residual": residual, "error_estimate": error,
            "passed": bool(residual <= tol + error)}


def default_tolerance(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``1e-6 * (1 + growth_norm)``; a failing growth integral still yields a finite value."""
    g = growth_integral(mu, spec)
    return REL_TOLERANCE * (1.0 + abs(float(np.real(g.value))))


def default_samples(n: int, count: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Scrambled Halton points with ``Re z in [-3, 3]`` and ``Im z in [0.5, 4]``."""
    u = qmc.Halton(d=2 * n, scramble=True, seed=seed).random(count)
    re = -3.0 + 6.0 * u[:, :n]
    im = 0.5 + 3.5 * u[:, n:]
    return re + 1j * im


def _samples(mu, z_samples):
    Z = default_samples(mu.dim) if z_samples is None else np.asarray(z_samples, dtype=complex)
    Z = Z.reshape(-1, mu.dim)
    if np.any(Z.imag <= 0):
        raise PreconditionError("condition samples must lie in the poly-upper half-plane")
    return Z


def check_spec(spec: QuadratureSpec, tol: float) -> QuadratureSpec:
    """Residuals near zero make ``abs_tol`` the binding target; tie it to ``tol``."""
    return spec.replace(abs_tol=max(spec.abs_tol, QUAD_FRACTION * tol))


def _integrate_checked(mu, integrand, spec, what, tol):
    res = integrate(mu, integrand, check_spec(spec, tol))
    notes = [] if res.converged else [f"{what}: quadrature did not reach its tolerance"]
    return np.atleast_1d(res.value), np.atleast_1d(res.error_estimate), notes


def _tol(mu, spec, tol):
    return default_tolerance(mu, spec) if tol is None else float(tol)


def check_sum_form(mu: Measure, z_samples=None, spec: QuadratureSpec = DEFAULT_SPEC,
                   tol: float | None = None) -> ConditionReport:
    """Residual ``|sum_rho int prod N_{rho_j}(z_j, t_j) dmu|`` per sample ``z``."""
    n = mu.dim
    tol = _tol(mu, spec, tol)
    if n == 1:
        return ConditionReport("sum_a", [], tol, ["vacuous for n = 1"])
    Z = _samples(mu, z_samples)
    rhos = enumerate_admissible_rho(n)
    vals, errs, notes = _integrate_checked(mu, integrands.rho_products(rhos, Z), spec, "sum form",
                                           tol)
    vals = vals.reshape(len(rhos), len(Z)).sum(axis=0)
    errs = errs.reshape(len(rhos), len(Z)).sum(axis=0)
    wit = [_witness("z", [_complex_pair(c) for c in z], abs(v), e, tol)
           for z, v, e in zip(Z, vals, errs)]
    return ConditionReport("sum_a", wit, tol, notes)


def check_per_rho_form(mu: Measure, rho, z_samples=None, spec: QuadratureSpec = DEFAULT_SPEC,
                       tol: float | None = None) -> ConditionReport:
    """Residual ``|int prod N_{rho_j}(z_j, t_j) dmu|`` per sample for one admissible ``rho``.

    Each factor depends on its own coordinate ``z_j`` of the sample point.
    """
    rho = rho if isinstance(rho, RhoVector) else RhoVector(tuple(rho))
    if not rho.admissible:
        raise PreconditionError(f"rho {rho.entries} needs both +1 and -1")
    if rho.n != mu.dim:
        raise PreconditionError("rho and measure dimensions differ")
    tol = _tol(mu, spec, tol)
    Z = _samples(mu, z_samples)
    vals, errs, notes = _integrate_checked(mu, integrands.rho_products([rho.entries], Z), spec,
                                           f"rho {rho.entries}", tol)
    wit = [_witness("z", [_complex_pair(c) for c in z], abs(v), e, tol)
           for z, v, e in zip(Z, vals, errs)]
    return ConditionReport("per_rho_b", wit, tol, notes + [f"rho = {list(rho.entries)}"])


def _moment_list(m, n):
    if isinstance(m, MomentIndex):
        ms = [m]
    elif len(m) and np.ndim(m[0]) == 0 and not isinstance(m[0], MomentIndex):
        ms = [MomentIndex(tuple(m))]
    else:
        ms = [x if isinstance(x, MomentIndex) else MomentIndex(tuple(x)) for x in m]
    for x in ms:
        if x.n != n:
            raise PreconditionError(f"moment index {x.m} has the wrong length")
        if not x.admissible:
            raise PreconditionError(f"moment index {x.m} needs a positive and a negative entry")
    return ms


def check_moment_form(mu: Measure, m, spec: QuadratureSpec = DEFAULT_SPEC,
                      tol: float | None = None) -> ConditionReport:
    """Residual ``|int prod ((t-i)/(t+i))^{m_l} (1+t_l^2)^-1 dmu|`` per multi-index.

    ``m`` is one multi-index or a list of them.
    """
    ms = _moment_list(m, mu.dim)
    tol = _tol(mu, spec, tol)
    M = np.array([x.m for x in ms])
    vals, errs, notes = _integrate_checked(mu, integrands.moments(M), spec, "moments", tol)
    wit = [_witness("m", list(x.m), abs(v), e, tol) for x, v, e in zip(ms, vals, errs)]
    return ConditionReport("moment_c", wit, tol, notes)


def moment_values(mu: Measure, m, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Complex moment integrals (signed values, not residuals)."""
    ms = _moment_list(m, mu.dim)
    res = integrate(mu, integrands.moments(np.array([x.m for x in ms])), spec)
    vals = np.atleast_1d(res.value)
    return vals


def check_pluriharmonic_form(mu: Measure, j1: int, j2: int, z_samples=None,
                             spec: QuadratureSpec = DEFAULT_SPEC,
                             tol: float | None = None) -> ConditionReport:
    """Residual of the mixed second-order integral for the pair ``j1 < j2`` (1-based)."""
    n = mu.dim
    if not 1 <= j1 < j2 <= n:
        raise PreconditionError(f"need 1 <= j1 < j2 <= {n}, got ({j1}, {j2})")
    tol = _tol(mu, spec, tol)
    Z = _samples(mu, z_samples)
    vals, errs, notes = _integrate_checked(mu, integrands.pluriharmonic(Z, j1, j2), spec,
                                           f"pair ({j1}, {j2})", tol)
    wit = [_witness("z", [_complex_pair(c) for c in z], abs(v), e, tol)
           for z, v, e in zip(Z, vals, errs)]
    return ConditionReport("pluriharmonic_d", wit, tol, notes + [f"pair = [{j1}, {j2}]"])


def check_torus_moments(mu: Measure, m, spec: QuadratureSpec = DEFAULT_SPEC,
                        tol: float | None = None) -> ConditionReport:
    """Residual ``|int exp(i m.s) dnu|`` for the transported torus measure.

    The torus integral equals ``2^n`` times the moment-form integral, so the
    tolerance is scaled by ``2^n`` as well.
    """
    ms = _moment_list(m, mu.dim)
    tol = (2.0 ** mu.dim) * _tol(mu, spec, tol)
    nu = transform_to_torus(mu)
    res = nu.integrate(integrands.torus_characters(np.array([x.m for x in ms])), check_spec(spec, tol))
    notes = [] if res.converged else ["torus moments: quadrature did not reach its tolerance"]
    vals = np.atleast_1d(res.value)
    errs = np.atleast_1d(res.error_estimate)
    wit = [_witness("m", list(x.m), abs(v), e, tol) for x, v, e in zip(ms, vals, errs)]
    return ConditionReport("torus", wit, tol, notes)


@dataclass
class StructuralReport:
    radii: tuple
    box_masses: list
    infinite_mass: bool
    zero: bool
    atoms: list

    @property
    def finite_nonzero(self) -> bool:
        return not self.zero and not self.infinite_mass

    @property
    def verdict(self) -> bool:
        return not self.finite_nonzero and not self.atoms

    def as_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "box_masses": self.box_masses,
            "infinite_mass": self.infinite_mass,
            "zero_measure": self.zero,
            "atoms": [{"location": list(a.location), "weight": a.weight} for a in self.atoms],
            "flags": (["finite nonzero mass"] if self.finite_nonzero else [])
                     + (["atoms present"] if self.atoms else []),
            "verdict": "pass" if self.verdict else "fail",
        }


def structural_checks(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC,
                      radii=(1.0, 10.0, 100.0, 1000.0)) -> StructuralReport:
    """Probe total mass with expanding smooth boxes and list atoms.

    For a finite measure the probe increments shrink roughly like ``1/R``;
    mass counts as infinite when the last increment is at least half the one
    before it.
    """
    if mu.dim < 2:
        raise PreconditionError("structural checks concern n >= 2")
    atoms = [a for a in mu.atoms() if a.weight > 0]
    if mu.is_zero():
        return StructuralReport(tuple(radii), [0.0] * len(radii), False, True, [])
    res = integrate(mu, integrands.box_probe(mu.dim, radii), spec)
    masses = [float(np.real(v)) for v in np.atleast_1d(res.value)]
    zero = max(masses) == 0.0
    infinite = not zero and (masses[-1] - masses[-2]) >= 0.5 * (masses[-2] - masses[-3])
    return StructuralReport(tuple(radii), masses, infinite, zero, atoms)


@dataclass
class AdmissibilityReport:
    growth_norm: float
    growth_converged: bool
    reports: list

    @property
    def verdict(self) -> bool:
        return self.growth_converged and all(r.verdict for r in self.reports)

    def find(self, form: str) -> ConditionReport | None:
        return next((r for r in self.reports if r.form == form), None)

    def as_dict(self) -> dict:
        return {
            "growth": {"value": self.growth_norm, "converged": self.growth_converged},
            "forms": [r.as_dict() for r in self.reports],
            "verdict": "pass" if self.verdict else "fail",
        }


def full_admissibility(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC,
                       degree_cutoff: int = DEFAULT_DEGREE, sample_count: int = DEFAULT_SAMPLES,
                       seed: int = DEFAULT_SEED, tol: float | None = None) -> AdmissibilityReport:
    """Growth check plus forms (a), (c) and (d) on the default witness sets."""
    g = growth_integral(mu, spec)
    gval = float(np.real(g.value))
    n = mu.dim
    if n == 1:
        return AdmissibilityReport(gval, bool(g.converged), [])
    tol = REL_TOLERANCE * (1.0 + abs(gval)) if tol is None else tol
    Z = default_samples(n, sample_count, seed)
    jobs = [lambda: check_sum_form(mu, Z, spec, tol),
            lambda: check_moment_form(mu, admissible_moments(n, degree_cutoff), spec, tol)]
    jobs += [lambda a=a, b=b: check_pluriharmonic_form(mu, a, b, Z, spec, tol)
             for a, b in itertools.combinations(range(1, n + 1), 2)]
    reports = ordered_map(lambda job: job(), jobs)
    return AdmissibilityReport(gval, bool(g.converged), reports)


def verdict_profile(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC, degree_cutoff: int = 2,
                    z_samples=None, tol: float | None = None) -> dict:
    """Verdict of every form on a common tolerance; used to compare the forms."""
    n = mu.dim
    tol = _tol(mu, spec, tol)
    if n == 1:
        return {f: True for f in FORMS[1:]}
    Z = _samples(mu, z_samples)
    ms = admissible_moments(n, degree_cutoff)
    per_rho = all(check_per_rho_form(mu, r, Z, spec, tol).verdict for r in enumerate_admissible_rho(n))
    pluri = all(check_pluriharmonic_form(mu, a, b, Z, spec, tol).verdict
                for a, b in itertools.combinations(range(1, n + 1), 2))
    return {
        "sum_a": check_sum_form(mu, Z, spec, tol).verdict,
        "per_rho_b": per_rho,
        "moment_c": check_moment_form(mu, ms, spec, tol).verdict,
        "pluriharmonic_d": pluri,
        "torus": check_torus_moments(mu, ms, spec, tol).verdict,
    }


def growth_report(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    g = growth_integral(mu, spec)
    if not g.converged:
        raise NotConverged("growth integral did not converge", g)
    return {"value": float(np.real(g.value)), "error_estimate": float(np.max(g.error_estimate)),
            "panels": g.panels_used}


__all__ = [
    "ConditionReport", "MomentIndex", "StructuralReport", "AdmissibilityReport",
    "admissible_moments", "default_samples", "default_tolerance", "check_sum_form",
    "check_per_rho_form", "check_moment_form", "moment_values", "check_pluriharmonic_form",
    "check_torus_moments", "structural_checks", "full_admissibility", "verdict_profile",
    "growth_report",
]
