"""Evaluation of functions from data ``(a, b, mu)`` and recovery of the data.

A function is represented as

    q(z) = a + sum_l b_l z_l + pi^-n * int K_n(z, t) dmu(t).

The same formula is evaluated off the poly-upper half-plane, with the linear
term taken at the coordinates as given.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (DomainError, NonTangentialPath, NotConverged,
                   PreconditionError, as_points, random_points, slot_fill)
from .extrapolation import LimitReport, richardson
from . import integrands
from .measures import (DEFAULT_SPEC, MEASURE_SCHEMA, Measure,
                       QuadratureSpec, integrate, lebesgue, measure_from_json)

log = logging.getLogger(__name__)

EPS_HN = 1e-10
# columns per vector-valued quadrature; bounds memory and keeps refinement local
BATCH = 64


@dataclass(frozen=True, eq=False)
class RepresentationData:
    """The triple ``(a, b, mu)``; ``b`` is nonnegative and ``mu`` lives on R^n."""

    a: float
    b: tuple
    mu: Measure

    def __post_init__(self):
        b = tuple(float(x) for x in np.atleast_1d(self.b))
        if any(x < 0 for x in b):
            raise DomainError(f"b must be nonnegative: {b}")
        if self.mu.dim != len(b):
            raise DomainError(f"b has {len(b)} entries but mu lives on R^{self.mu.dim}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.b)

    def pure(self) -> "RepresentationData":
        """Same measure with ``a`` and ``b`` zeroed."""
        return RepresentationData(0.0, (0.0,) * self.n, self.mu)

    def to_json(self) -> dict:
        return {"a": self.a, "b": list(self.b), "mu": self.mu.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "RepresentationData":
        return cls(obj["a"], tuple(obj["b"]), measure_from_json(obj["mu"]))


DATA_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["a", "b", "mu"],
    "properties": {
        "a": {"type": "number"},
        "b": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "mu": {"$ref": "#/$defs/measure"},
    },
    "$defs": MEASURE_SCHEMA["$defs"],
}


@dataclass
class Evaluation:
    """Batched values with their quadrature error bounds."""

    values: np.ndarray
    errors: np.ndarray
    panels: int
    converged: bool


def _integral_batches(mu: Measure, builder: Callable, Z: np.ndarray, spec: QuadratureSpec):
    values = np.zeros(len(Z), dtype=complex)
    errors = np.zeros(len(Z))
    panels, ok = 0, True
    if mu.is_zero():
        return values, errors, panels, ok
    for s in range(0, len(Z), BATCH):
        chunk = Z[s:s + BATCH]
        res = integrate(mu, builder(chunk), spec)
        values[s:s + BATCH] = res.value
        errors[s:s + BATCH] = res.error_estimate
        panels += res.panels_used
        ok = ok and res.converged
    return values, errors, panels, ok


def evaluate_many(data: RepresentationData, Z, spec: QuadratureSpec = DEFAULT_SPEC,
                  *, strict: bool = True) -> Evaluation:
    """Evaluate the represented function at the rows of ``Z`` (any off-real points).

    Raises ``NotConverged`` (carrying the ``Evaluation``) when ``strict`` and the
    quadrature misses its tolerance.
    """
    Z = as_points(Z, data.n).reshape(-1, data.n)
    if np.any(Z.imag == 0):
        raise DomainError("evaluation points must be off the real axis")
    scale = math.pi ** -data.n
    vals, errs, panels, ok = _integral_batches(data.mu, integrands.kernel, Z, spec)
    out = Evaluation(data.a + Z @ np.asarray(data.b) + scale * vals, scale * errs, panels, ok)
    if strict and not ok:
        raise NotConverged("representation integral did not converge", out)
    return out


def evaluate_q(data: RepresentationData, z, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Value at a point of the poly-upper half-plane."""
    z = as_points(z, data.n)
    if z.ndim != 1 or np.any(z.imag <= 0):
        raise DomainError("evaluate_q needs a single point with every Im z > 0")
    return complex(evaluate_many(data, z, spec).values[0])


def evaluate_q_extended(data: RepresentationData, z, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Value of the same formula at any point of ``(C \\ R)^n``."""
    z = as_points(z, data.n)
    if z.ndim != 1:
        raise DomainError("evaluate_q_extended takes a single point")
    return complex(evaluate_many(data, z, spec).values[0])


def evaluate_im_q_many(data: RepresentationData, Z, spec: QuadratureSpec = DEFAULT_SPEC,
                       *, strict: bool = True) -> Evaluation:
    """Imaginary part through the Poisson kernel, at upper points."""
    Z = as_points(Z, data.n).reshape(-1, data.n)
    if np.any(Z.imag <= 0):
        raise DomainError("the Poisson representation needs every Im z > 0")
    scale = math.pi ** -data.n
    vals, errs, panels, ok = _integral_batches(data.mu, integrands.poisson, Z, spec)
    out = Evaluation(Z.imag @ np.asarray(data.b) + scale * vals.real, scale * errs, panels, ok)
    if strict and not ok:
        raise NotConverged("Poisson integral did not converge", out)
    return out


def evaluate_im_q(data: RepresentationData, z, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return float(np.real(evaluate_im_q_many(data, as_points(z, data.n), spec).values[0]))


@dataclass
class FunctionOracle:
    """A queryable function on ``(C \\ R)^n``.

    ``func`` maps an ``(m, n)`` complex array to ``(m,)`` values when
    ``vectorized``; otherwise it is called once per point. Upper points whose
    value has imaginary part below ``-eps_hn`` raise ``PreconditionError``.
    """

    func: Callable
    n: int
    eps_hn: float = EPS_HN
    vectorized: bool = True
    calls: int = field(default=0, compare=False)

    def batch(self, Z) -> np.ndarray:
        Z = as_points(Z, self.n).reshape(-1, self.n)
        self.calls += len(Z)
        if self.vectorized:
            out = np.asarray(self.func(Z), dtype=complex).reshape(len(Z))
        else:
            out = np.array([complex(self.func(z)) for z in Z])
        upper = np.all(Z.imag > 0, axis=1)
        if np.any(out[upper].imag < -self.eps_hn):
            raise PreconditionError("oracle has negative imaginary part on the upper half-plane")
        return out

    def __call__(self, z) -> complex:
        return complex(self.batch(as_points(z, self.n))[0])


def oracle_from_data(data: RepresentationData, spec: QuadratureSpec = DEFAULT_SPEC) -> FunctionOracle:
    return FunctionOracle(lambda Z: evaluate_many(data, Z, spec).values, data.n)


def recover_a(q: FunctionOracle) -> float:
    """Real part of ``q(i, ..., i)``."""
    return float(q(np.full(q.n, 1j)).real)


@dataclass
class Recovery:
    """A recovered real number with the limit report behind it."""

    value: float
    report: LimitReport
    imag_residual: float
    warnings: list = field(default_factory=list)


def _extrapolate(h, samples, tol) -> tuple[complex, LimitReport]:
    rep = richardson(h, samples, tol=tol)
    return rep.value, rep


def recover_b(q: FunctionOracle, j: int, path: NonTangentialPath | None = None,
              tol: float = 1e-3) -> Recovery:
    """Limit of ``q(iy at slot j, i elsewhere) / (iy)`` as ``y`` grows."""
    path = path or NonTangentialPath.to_infinity()
    if not path.infinite:
        raise PreconditionError("recover_b needs a path towards infinity")
    w = path.points()
    Z = np.array([slot_fill(x, j, q.n) for x in w])
    value, rep = _extrapolate(1.0 / np.abs(w), q.batch(Z) / w, tol)
    warnings = []
    est = value.real
    if est < 0:
        if est < -rep.error_estimate:
            warnings.append(f"negative slope estimate {est:.3g} beyond its error bar")
            log.warning("recover_b: clamping %.3g to 0", est)
        else:
            warnings.append(f"clamped slope estimate {est:.3g} to 0")
            log.debug("recover_b: clamping %.3g to 0", est)
        est = 0.0
    rep.warnings.extend(warnings)
    return Recovery(float(est), rep, abs(value.imag), warnings)


def recover_c(q: FunctionOracle, j: int, path: NonTangentialPath | None = None,
              tol: float = 1e-3) -> Recovery:
    """Limit of ``z_j * q(z_j at slot j, i elsewhere)`` as ``z_j -> 0``."""
    path = path or NonTangentialPath.to_point(0.0)
    if path.infinite or path.anchor != 0.0:
        raise PreconditionError("recover_c needs a path anchored at 0")
    w = path.points()
    Z = np.array([slot_fill(x, j, q.n) for x in w])
    value, rep = _extrapolate(np.abs(w), w * q.batch(Z), tol)
    warnings = []
    if value.real > rep.error_estimate + 1e-12:
        warnings.append(f"positive estimate {value.real:.3g} beyond its error bar")
    rep.warnings.extend(warnings)
    return Recovery(float(value.real), rep, abs(value.imag), warnings)


def recover_point_mass_1d(q: FunctionOracle, t0: float, path: NonTangentialPath | None = None,
                          tol: float = 1e-3) -> Recovery:
    """Mass at ``t0`` as ``pi * lim (t0 - z) q(z)``; ``n = 1`` only."""
    if q.n != 1:
        raise PreconditionError("point-mass recovery is one-dimensional")
    path = path or NonTangentialPath.to_point(t0)
    if path.infinite or path.anchor != t0:
        raise PreconditionError("path must be anchored at t0")
    z = path.points()
    value, rep = _extrapolate(np.abs(z - t0), math.pi * (t0 - z) * q.batch(z[:, None]), tol)
    return Recovery(float(value.real), rep, abs(value.imag))


def slope_at_infinity_1d(q: FunctionOracle, path: NonTangentialPath | None = None,
                         tol: float = 1e-3) -> Recovery:
    """Limit of ``q(z) / z`` at infinity; ``n = 1`` only."""
    if q.n != 1:
        raise PreconditionError("slope recovery is one-dimensional")
    path = path or NonTangentialPath.to_infinity()
    if not path.infinite:
        raise PreconditionError("slope recovery needs a path towards infinity")
    z = path.points()
    value, rep = _extrapolate(1.0 / np.abs(z), q.batch(z[:, None]) / z, tol)
    return Recovery(float(value.real), rep, abs(value.imag))


def default_y_ladder(kmin: int = 1, kmax: int = 6) -> tuple:
    return tuple(2.0 ** -k for k in range(kmin, kmax + 1))


def stieltjes_inverse(q: FunctionOracle, psi: Callable, y_ladder=None,
                      spec: QuadratureSpec = DEFAULT_SPEC, tol: float = 1e-2) -> Recovery:
    """Extrapolate ``int psi(x) Im q(x + iy) dx`` to ``y -> 0``.

    ``psi`` maps an ``(m, n)`` real array to ``(m,)`` and must decay at least
    like ``prod 1/(1+x^2)``. The whole ladder is integrated as one
    vector-valued quadrature.
    """
    ys = np.asarray(default_y_ladder() if y_ladder is None else y_ladder, dtype=float)
    if np.any(ys <= 0) or np.any(np.diff(ys) >= 0):
        raise DomainError("y ladder must be positive and decreasing")
    n = q.n

    def integrand(x):
        m = len(x)
        Z = (x[:, None, :] + 1j * ys[None, :, None]).reshape(-1, n)
        im = q.batch(Z).imag.reshape(m, len(ys))
        return psi(x)[:, None] * im

    res = integrate(lebesgue(n), integrand, spec)
    if not res.converged:
        raise NotConverged("Stieltjes integrals did not converge", res)
    value, rep = _extrapolate(ys, np.real(res.value), tol)
    return Recovery(float(value.real), rep, 0.0)


@dataclass
class ConstancyVerdict:
    applicable: bool
    constant: bool | None
    value: complex
    max_deviation: float | None

    def as_dict(self) -> dict:
        return {"applicable": self.applicable, "constant": self.constant,
                "value": [self.value.real, self.value.imag], "max_deviation": self.max_deviation}


def constancy_check(q: FunctionOracle, sample, count: int = 50, seed: int = 0,
                    tol: float = 1e-8) -> ConstancyVerdict:
    """If ``Im q(sample)`` vanishes, confirm that ``q`` is constant by sampling."""
    sample = as_points(sample, q.n)
    v0 = q(sample)
    if v0.imag > q.eps_hn:
        return ConstancyVerdict(False, None, v0, None)
    Z = random_points(np.random.default_rng(seed), count, q.n)
    dev = float(np.max(np.abs(q.batch(Z) - v0)))
    return ConstancyVerdict(True, dev <= tol * (1 + abs(v0)), v0, dev)


def nevanlinna_integral_1d(mu: Measure, z: complex, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """One-variable integral ``int (1/(t-z) - t/(1+t^2)) dmu`` in its direct form."""
    if mu.dim != 1:
        raise DomainError("one-variable measure expected")

    def f(t):
        s = t[:, 0]
        return 1.0 / (s - z) - s / (1.0 + s * s)

    res = integrate(mu, f, spec)
    if not res.converged:
        raise NotConverged("one-variable integral did not converge", res)
    return complex(res.value)


__all__ = [
    "RepresentationData", "FunctionOracle", "Evaluation", "Recovery", "ConstancyVerdict",
    "DATA_SCHEMA", "EPS_HN", "evaluate_many", "evaluate_q", "evaluate_q_extended",
    "evaluate_im_q", "evaluate_im_q_many", "oracle_from_data", "recover_a", "recover_b",
    "recover_c", "recover_point_mass_1d", "slope_at_infinity_1d", "stieltjes_inverse",
    "constancy_check", "default_y_ladder", "nevanlinna_integral_1d",
]
