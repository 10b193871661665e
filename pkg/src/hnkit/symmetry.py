"""Reflection map and the cross-component symmetry formulas.

For a pure-integral function ``g`` (data with ``a = 0`` and ``b = 0``) the
value at any point of ``(C \\ R)^n`` is determined by values at points whose
coordinates are either ``i`` or conjugates of the original coordinates:

    g(z) = (sgn|I-| - 1) * sum_{D in C- u C+} (-1)^|D| (conj g(Psi_D z) + conj g(i1))
           + conj g(i1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import integrands
from .core import (DomainError, IndexSet, OffRealPoint, PreconditionError, SymmetryClassification,
                   as_points, classify, EPS_CLS)
from .measures import DEFAULT_SPEC, QuadratureSpec, integrate
from .representation import RepresentationData, evaluate_many


@dataclass(frozen=True)
class ReflectionSpec:
    """A base point and a subset ``D`` of its non-``i``/``-i`` coordinates."""

    base: OffRealPoint
    subset: IndexSet

    def __post_init__(self):
        if not isinstance(self.base, OffRealPoint):
            object.__setattr__(self, "base", OffRealPoint(tuple(as_points(self.base))))
        if not isinstance(self.subset, IndexSet):
            object.__setattr__(self, "subset", IndexSet(self.base.n, self.subset))
        if self.subset.n != self.base.n:
            raise DomainError("subset and base point dimensions differ")
        cls = classify(self.base)
        if self.subset.members & (cls.i_plus.members | cls.i_minus.members):
            raise DomainError("reflection subset must avoid coordinates equal to i or -i")


def psi_map(spec: ReflectionSpec) -> OffRealPoint:
    """Conjugate the coordinates in ``D``; set every other coordinate to ``i``."""
    coords = tuple(c.conjugate() if ell in spec.subset else 1j
                   for ell, c in enumerate(spec.base.coords, start=1))
    return OffRealPoint(coords)


def _psi_array(z: np.ndarray, subset) -> np.ndarray:
    out = np.full(z.shape, 1j, dtype=complex)
    idx = [d - 1 for d in subset]
    out[idx] = np.conj(z[idx])
    return out


def reflection_subsets(cls: SymmetryClassification) -> list[tuple]:
    free = sorted(cls.c_plus.members | cls.c_minus.members)
    return [sub for k in range(len(free) + 1) for sub in itertools.combinations(free, k)]


def symmetric_values_g(g: Callable, Z, eps: float = EPS_CLS) -> np.ndarray:
    """Right-hand side of the symmetry formula at each row of ``Z``.

    ``g`` maps an ``(m, n)`` complex array to ``(m,)`` values. All needed
    reflected points are gathered, deduplicated and evaluated in one call.
    Rows with a coordinate equal to ``-i`` short-circuit to ``conj(g(i1))``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    m, n = Z.shape
    i1 = tuple(np.full(n, 1j))
    plans = []
    points = {i1: 0}
    for z in Z:
        cls = classify(z, eps)
        if cls.i_minus.k:
            plans.append(None)
            continue
        terms = []
        for sub in reflection_subsets(cls):
            key = tuple(_psi_array(z, sub))
            points.setdefault(key, len(points))
            terms.append(((-1) ** len(sub), points[key]))
        plans.append(terms)
    keys = sorted(points, key=points.get)
    values = np.asarray(g(np.array(keys))).reshape(len(keys))
    cg = np.conj(values)
    cgi = cg[0]
    out = np.empty(m, dtype=complex)
    for r, terms in enumerate(plans):
        if terms is None:
            out[r] = cgi
        else:
            out[r] = -sum(sign * (cg[idx] + cgi) for sign, idx in terms) + cgi
    return out


def symmetric_value_g(g: Callable, z, eps: float = EPS_CLS) -> complex:
    """Single-point version of ``symmetric_values_g``."""
    return complex(symmetric_values_g(g, as_points(z)[None, :], eps)[0])


def linear_part(data: RepresentationData, Z) -> np.ndarray:
    """``a + sum_l b_l w_l`` at the coordinates as given.

    Written per class this is ``b z`` on C+, ``i b`` on I+, ``-i b`` on I- and
    ``b`` times the (lower half-plane) coordinate on C-.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    return data.a + Z @ np.asarray(data.b)


def symmetric_values_q(data: RepresentationData, Z, spec: QuadratureSpec = DEFAULT_SPEC,
                       g: Callable | None = None) -> np.ndarray:
    """Symmetry formula for ``q = a + b.w + q0`` with ``q0`` the pure-integral part.

    ``g`` overrides the evaluator of ``q0`` (for example a closed form).
    """
    pure = data.pure()
    g = g or (lambda P: evaluate_many(pure, P, spec).values)
    return linear_part(data, Z) + symmetric_values_g(g, Z)


def symmetric_value_q(data: RepresentationData, z, spec: QuadratureSpec = DEFAULT_SPEC,
                      g: Callable | None = None) -> complex:
    return complex(symmetric_values_q(data, as_points(z, data.n)[None, :], spec, g)[0])


@dataclass
class IndependenceReport:
    point: list
    derivatives: dict
    errors: dict
    perturbation_deviation: float | None
    tolerance: float

    @property
    def max_sensitivity(self) -> float:
        return max(self.derivatives.values(), default=0.0)

    @property
    def verdict(self) -> bool:
        dev_ok = self.perturbation_deviation is None or self.perturbation_deviation <= self.tolerance
        return all(d <= self.tolerance + self.errors.get(k, 0.0)
                   for k, d in self.derivatives.items()) and dev_ok

    def as_dict(self) -> dict:
        return {"point": self.point, "derivatives": {str(k): v for k, v in self.derivatives.items()},
                "error_estimates": {str(k): v for k, v in self.errors.items()},
                "perturbation_deviation": self.perturbation_deviation,
                "tolerance": self.tolerance, "verdict": "pass" if self.verdict else "fail"}


def _cplus(z, eps=EPS_CLS):
    cls = classify(z, eps)
    if not (cls.c_minus.k or cls.i_minus.k):
        raise PreconditionError("independence needs a coordinate in the lower half-plane")
    return cls.c_plus.sorted()


def check_cplus_independence(data: RepresentationData, z, perturbations=None,
                             spec: QuadratureSpec = DEFAULT_SPEC, tol: float = 1e-6,
                             rel_step: float = 1e-4) -> IndependenceReport:
    """Sensitivity of ``q0`` to its upper-half-plane coordinates at a mixed point.

    Derivatives are central differences with step ``rel_step * |z_l|`` taken
    inside the integral, so the two evaluations share one quadrature. Each
    perturbation ``delta`` (kept in the upper half-plane) is also applied to
    every C+ coordinate and the largest change of ``q0`` reported.
    """
    z = as_points(z, data.n)
    cp = _cplus(z)
    pure = data.pure()
    qspec = spec.replace(abs_tol=max(spec.abs_tol, 1e-3 * tol))
    derivs, errs = {}, {}
    scale = np.pi ** -data.n
    for ell in cp:
        res = integrate(data.mu, integrands.kernel_derivative(z[None, :], ell, rel_step), qspec)
        derivs[ell] = float(scale * abs(np.atleast_1d(res.value)[0]))
        errs[ell] = float(scale * np.atleast_1d(res.error_estimate)[0])
    deviation = None
    if perturbations is not None and cp:
        pts = [z]
        for ell in cp:
            for d in perturbations:
                w = z.copy()
                w[ell - 1] = w[ell - 1] + complex(d)
                if w[ell - 1].imag <= 0:
                    raise DomainError("perturbation leaves the upper half-plane")
                pts.append(w)
        vals = evaluate_many(pure, np.array(pts), qspec).values
        deviation = float(np.max(np.abs(vals[1:] - vals[0])))
    return IndependenceReport([[c.real, c.imag] for c in z], derivs, errs, deviation, tol)


def closed_form_sensitivity(func: Callable, z, rel_step: float = 1e-4) -> dict:
    """Central-difference ``|d func / d z_l|`` for each C+ coordinate of ``z``."""
    z = as_points(z)
    out = {}
    for ell in _cplus(z):
        h = rel_step * abs(z[ell - 1])
        zp, zm = z.copy(), z.copy()
        zp[ell - 1] += h
        zm[ell - 1] -= h
        vals = np.asarray(func(np.array([zp, zm]))).reshape(2)
        out[ell] = float(abs(vals[0] - vals[1]) / (2 * h))
    return out
