"""Positive Borel measures on R^k and integration against them.

Continuous parts are integrated after the substitution ``t = tan(s)`` which
maps ``R^k`` onto the open box ``(-pi/2, pi/2)^k``. The Jacobian
``prod(1 + t^2)`` cancels the quadratic decay carried by every kernel in this
package, so the pulled-back integrands are bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DomainError, NotConverged
from .kernels import boundary_angle
from .quadrature import adaptive_cubature


def _density_one(t):
    return np.ones(t.shape[:-1])


def _density_inv_product(t):
    return np.prod(1.0 / (1.0 + t * t), axis=-1)


# name -> (callable, per-axis factor, certificate constant C, certificate power p);
# every builtin density is a product of one factor per coordinate
DENSITIES = {
    "one": (_density_one, lambda s: np.ones_like(s), 1.0, 0.0),
    "inv_one_plus_t2_product": (_density_inv_product, lambda s: 1.0 / (1.0 + s * s), 1.0, -1.0),
}


@dataclass(frozen=True, eq=False)
class Separable:
    """Integrand ``sum_r coef_r * prod_l factor_{r,l}(t_l)``.

    Each factor maps an ``(m,)`` real array to ``(m,)`` or ``(m, p)``;
    ``coef_r`` is a scalar or a length-``p`` array. Calling the object
    evaluates it at ``(m, k)`` points like any other integrand, while product
    measures integrate it axis by axis. ``hints`` optionally gives, per axis,
    the ``(centre, width)`` of the sharpest feature; hyperplane charts use it.
    """

    terms: tuple
    k: int
    width: int | None = None
    hints: tuple | None = None

    def __call__(self, t):
        m = len(t)
        shape = (m,) if self.width is None else (m, self.width)
        out = np.zeros(shape, dtype=complex)
        for coef, factors in self.terms:
            prod = np.ones(shape, dtype=complex)
            for ell, fac in enumerate(factors):
                v = np.asarray(fac(t[:, ell]))
                prod = prod * (v[:, None] if v.ndim == 1 and len(shape) == 2 else v)
            out = out + np.asarray(coef) * prod
        return out


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for one integration.

    ``max_panels=None`` picks 10**6 panels for k <= 2 and 10**7 beyond.
    ``seed`` is reserved for randomized panel orderings; the engine is
    deterministic and ignores it.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_panels: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_panels is not None and self.max_panels < 1:
            raise DomainError("max_panels must be positive")

    def panels_for(self, k: int) -> int:
        if self.max_panels is not None:
            return self.max_panels
        return 10**6 if k <= 2 else 10**7

    def replace(self, **kw) -> "QuadratureSpec":
        return QuadratureSpec(**{**self.__dict__, **kw})


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class IntegralResult:
    value: complex | np.ndarray
    error_estimate: float | np.ndarray
    panels_used: int
    converged: bool

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(self.value + other.value,
                              self.error_estimate + other.error_estimate,
                              self.panels_used + other.panels_used,
                              self.converged and other.converged)

    def scaled(self, c: float) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.error_estimate,
                              self.panels_used, self.converged)


def _shape_probe(integrand, k):
    v = np.asarray(integrand(np.zeros((1, k))))
    return v.shape[1:]


def _zero_result(integrand, k):
    shape = _shape_probe(integrand, k)
    if shape:
        return IntegralResult(np.zeros(shape, dtype=complex), np.zeros(shape), 0, True)
    return IntegralResult(0j, 0.0, 0, True)


def _pack(values, errors, panels, converged, vector):
    if vector:
        return IntegralResult(np.asarray(values, dtype=complex), np.asarray(errors, dtype=float),
                              panels, converged)
    return IntegralResult(complex(values[0]), float(errors[0]), panels, converged)


class Measure:
    """Base class; concrete variants below."""

    dim: int

    def integrate(self, integrand, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def atoms(self) -> list["PointMass"]:
        return []

    def is_zero(self) -> bool:
        return False

    def __rmul__(self, c):
        return Scaled(float(c), self)

    def __add__(self, other):
        return Sum((self, other))


@dataclass(frozen=True, eq=False)
class LebesgueDensity(Measure):
    """``density(t) dt`` on R^k.

    ``density`` is a registry name or a vectorized callable ``(m, k) -> (m,)``.
    The decay certificate states ``density(t) <= C * prod(1+t^2)^p``.
    """

    k: int
    density: str | Callable = "one"
    decay_constant: float | None = None
    decay_power: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("density measures need k >= 1")
        if isinstance(self.density, str):
            if self.density not in DENSITIES:
                raise DomainError(f"unknown density {self.density!r}")
            _, _, c, p = DENSITIES[self.density]
            if self.decay_constant is None:
                object.__setattr__(self, "decay_constant", c)
            if self.decay_power is None:
                object.__setattr__(self, "decay_power", p)

    @property
    def dim(self):
        return self.k

    def density_fn(self):
        return DENSITIES[self.density][0] if isinstance(self.density, str) else self.density

    def integrate(self, integrand, spec=DEFAULT_SPEC):
        if isinstance(integrand, Separable) and isinstance(self.density, str):
            return _fubini(integrand, DENSITIES[self.density][1], self.k, spec)
        dens = self.density_fn()
        k = self.k
        probe = _shape_probe(integrand, k)

        def pulled_back(s):
            t = np.tan(s)
            jac = np.prod(1.0 + t * t, axis=-1)
            w = dens(t) * jac
            v = np.asarray(integrand(t))
            return v * (w[:, None] if v.ndim == 2 else w)

        h = np.full(k, math.pi / 2)
        r = adaptive_cubature(pulled_back, -h, h, rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                              max_panels=spec.panels_for(k))
        return _pack(r.value, r.error, r.panels, r.converged, bool(probe))

    def to_json(self):
        if not isinstance(self.density, str):
            raise DomainError("callable densities cannot be serialized")
        return {"type": "lebesgue_density", "k": self.k, "density": self.density}


def _fubini_pass(sep, axis_density, k, rel, atol, spec):
    h = np.array([math.pi / 2])
    width = sep.width or 1
    nterms = len(sep.terms)
    vals = np.empty((k, nterms, width), dtype=complex)
    errs = np.empty((k, nterms, width))
    panels, ok = 0, True
    for ell in range(k):
        def cols(s, ell=ell):
            t = np.tan(s[:, 0])
            w = axis_density(t) * (1.0 + t * t)
            blocks = []
            for _, factors in sep.terms:
                v = np.asarray(factors[ell](t), dtype=complex)
                v = v if v.ndim == 2 else v[:, None]
                blocks.append(np.broadcast_to(v, (len(t), width)) * w[:, None])
            return np.concatenate(blocks, axis=1)

        r = adaptive_cubature(cols, -h, h, rel_tol=rel, abs_tol=atol,
                              max_panels=spec.panels_for(1))
        vals[ell] = r.value.reshape(nterms, width)
        errs[ell] = r.error.reshape(nterms, width)
        panels += r.panels
        ok = ok and r.converged
    prod = np.prod(vals, axis=0)
    bound = np.prod(np.abs(vals) + errs, axis=0) - np.abs(prod)
    coefs = np.array([np.broadcast_to(np.asarray(c, dtype=complex), (width,))
                      for c, _ in sep.terms])
    total = (coefs * prod).sum(axis=0)
    err = (np.abs(coefs) * np.maximum(bound, 0.0)).sum(axis=0)
    return total, err, panels, ok


def _fubini(sep: Separable, axis_density, k: int, spec: QuadratureSpec) -> IntegralResult:
    """Axis-by-axis integration of a separable integrand against a product measure.

    One vector-valued 1-D quadrature per axis covers every term. If the terms
    cancel, the per-axis tolerance is tightened once in proportion.
    """
    rel = spec.rel_tol / (4 * k)
    atol = spec.abs_tol / (4 * k)
    total, err, panels, ok = _fubini_pass(sep, axis_density, k, rel, atol, spec)
    target = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
    worst = float(np.max(err / target))
    if ok and worst > 1.0:
        shrink = min(worst * 4, 1e6)
        total, err, p2, ok = _fubini_pass(sep, axis_density, k, max(rel / shrink, 1e-15),
                                          max(atol / shrink, 1e-300), spec)
        panels += p2
        target = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
    ok = ok and bool(np.all(err <= target))
    vector = sep.width is not None
    return _pack(total, err, panels, ok, vector)


@dataclass(frozen=True, eq=False)
class HyperplaneLebesgue(Measure):
    """``scale * delta(normal . t - offset) dt`` on R^n.

    Equivalently ``scale / |normal|`` times the surface measure of the
    hyperplane. With this normalization ``pi * HyperplaneLebesgue((1,1,1), 0)``
    represents ``-1/(z1+z2+z3)``.

    Integration uses one graph chart per coordinate ``c`` with
    ``normal[c] != 0`` (solve for ``t_c``), glued by the partition of unity
    ``w_c = r_c / sum_m r_m`` with ``r_m = normal_m^2 (1+t_m^2)^2``. Each
    chart weight vanishes where its solved coordinate stays bounded while the
    others grow, which is exactly where a single chart would leave a
    non-decaying ridge after the ``tan`` compactification; the square makes
    that decay fast enough to keep the corners cheap. When the integrand
    carries feature hints ``(x_m, y_m)``, ``r_m`` is further multiplied by
    ``((t_m-x_m)^2 + y_m^2) / ((t_m-x_m)^2 + 1)`` so that sharp features of
    ``t_m`` are integrated only in charts where ``t_m`` is a parameter axis.
    """

    normal: tuple
    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        normal = tuple(float(x) for x in self.normal)
        if not normal or not any(normal):
            raise DomainError("hyperplane normal must be nonzero")
        if self.scale <= 0:
            raise DomainError("hyperplane scale must be positive")
        object.__setattr__(self, "normal", normal)

    @property
    def dim(self):
        return len(self.normal)

    @property
    def surface_weight(self) -> float:
        return self.scale / float(np.linalg.norm(self.normal))

    def charts(self) -> list[int]:
        return [c for c, v in enumerate(self.normal) if v != 0]

    def integrate(self, integrand, spec=DEFAULT_SPEC):
        n = self.dim
        nrm = np.asarray(self.normal)
        probe = _shape_probe(integrand, n)
        if n == 1:
            loc = np.array([[self.offset / nrm[0]]])
            v = np.atleast_1d(np.asarray(integrand(loc))[0]) * self.scale / abs(nrm[0])
            return _pack(v, np.zeros(v.shape), 0, True, bool(probe))
        sq = nrm * nrm
        hints = getattr(integrand, "hints", None)
        if hints is not None:
            centre = np.array([c for c, _ in hints], dtype=float)
            width = np.array([min(abs(w), 1.0) for _, w in hints], dtype=float)

        def chart_weights(t):
            r = sq * (1.0 + t * t) ** 2
            if hints is not None:
                d = (t - centre) ** 2
                r = r * (d + width ** 2) / (d + 1.0)
            return r
        h = np.full(n - 1, math.pi / 2)
        charts = self.charts()
        total, err, panels, ok = 0j, 0.0, 0, True
        for c in charts:
            keep = [m for m in range(n) if m != c]

            def pulled_back(s, c=c, keep=keep):
                u = np.tan(s)
                t = np.empty((len(s), n))
                t[:, keep] = u
                t[:, c] = (self.offset - u @ nrm[keep]) / nrm[c]
                r = chart_weights(t)
                w = r[:, c] / r.sum(axis=1)
                jac = np.prod(1.0 + u * u, axis=-1) * w * (self.scale / abs(nrm[c]))
                v = np.asarray(integrand(t))
                return v * (jac[:, None] if v.ndim == 2 else jac)

            r = adaptive_cubature(pulled_back, -h, h, rel_tol=spec.rel_tol / len(charts),
                                  abs_tol=spec.abs_tol / len(charts),
                                  max_panels=spec.panels_for(n - 1))
            total = total + r.value
            err = err + r.error
            panels += r.panels
            ok = ok and r.converged
        ok = ok and bool(np.all(err <= np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))))
        return _pack(total, err, panels, ok, bool(probe))

    def to_json(self):
        return {"type": "hyperplane", "normal": list(self.normal), "offset": self.offset,
                "scale": self.scale}


@dataclass(frozen=True, eq=False)
class PointMass(Measure):
    location: tuple
    weight: float = 1.0

    def __post_init__(self):
        loc = tuple(float(x) for x in np.atleast_1d(self.location))
        if not loc:
            raise DomainError("point mass needs a location")
        if self.weight <= 0:
            raise DomainError("point mass weight must be positive")
        object.__setattr__(self, "location", loc)

    @property
    def dim(self):
        return len(self.location)

    def integrate(self, integrand, spec=DEFAULT_SPEC):
        v = np.asarray(integrand(np.array([self.location])))
        if v.ndim == 2:
            return IntegralResult(self.weight * v[0].astype(complex), np.zeros(v.shape[1]), 0, True)
        return IntegralResult(complex(self.weight * v[0]), 0.0, 0, True)

    def atoms(self):
        return [self]

    def to_json(self):
        return {"type": "point_mass", "location": list(self.location), "weight": self.weight}


@dataclass(frozen=True, eq=False)
class Scaled(Measure):
    factor: float
    inner: Measure

    def __post_init__(self):
        if self.factor < 0:
            raise DomainError("scale factor must be nonnegative")

    @property
    def dim(self):
        return self.inner.dim

    def integrate(self, integrand, spec=DEFAULT_SPEC):
        if self.factor == 0:
            return _zero_result(integrand, self.dim)
        return self.inner.integrate(integrand, spec).scaled(self.factor)

    def atoms(self):
        if self.factor == 0:
            return []
        return [PointMass(a.location, self.factor * a.weight) for a in self.inner.atoms()]

    def is_zero(self):
        return self.factor == 0 or self.inner.is_zero()

    def to_json(self):
        return {"type": "scaled", "factor": self.factor, "inner": self.inner.to_json()}


@dataclass(frozen=True, eq=False)
class Sum(Measure):
    terms: tuple = field(default_factory=tuple)
    k: int | None = None

    def __post_init__(self):
        terms = tuple(self.terms)
        dims = {t.dim for t in terms}
        if self.k is not None:
            dims.add(self.k)
        if len(dims) != 1:
            raise DomainError("sum terms must share one dimension (give k for an empty sum)")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "k", dims.pop())

    @property
    def dim(self):
        return self.k

    def integrate(self, integrand, spec=DEFAULT_SPEC):
        if not self.terms:
            return _zero_result(integrand, self.dim)
        out = self.terms[0].integrate(integrand, spec)
        for term in self.terms[1:]:
            out = out + term.integrate(integrand, spec)
        return out

    def atoms(self):
        return [a for t in self.terms for a in t.atoms()]

    def is_zero(self):
        return all(t.is_zero() for t in self.terms)

    def to_json(self):
        return {"type": "sum", "k": self.k, "terms": [t.to_json() for t in self.terms]}


def zero_measure(k: int) -> Sum:
    return Sum((), k)


def lebesgue(k: int) -> LebesgueDensity:
    return LebesgueDensity(k, "one")


def integrate(mu: Measure, integrand, spec: QuadratureSpec = DEFAULT_SPEC,
              dim: int | None = None) -> IntegralResult:
    """Integrate a vectorized ``integrand`` against ``mu``.

    ``integrand`` maps an ``(m, k)`` array of points to ``(m,)`` or ``(m, p)``.
    Non-convergence is reported through ``converged=False``, not raised.
    """
    if dim is not None and dim != mu.dim:
        raise DomainError(f"integrand dimension {dim} does not match measure dimension {mu.dim}")
    return mu.integrate(integrand, spec)


def inverse_square_weight(t):
    """``prod 1/(1 + t^2)`` over the last axis."""
    return np.prod(1.0 / (1.0 + t * t), axis=-1)


def _inv_sq(s):
    return 1.0 / (1.0 + s * s)


def growth_integrand(k: int) -> Separable:
    return Separable(((1.0, (_inv_sq,) * k),), k)


def growth_integral(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    return integrate(mu, growth_integrand(mu.dim), spec)


def growth_norm(mu: Measure, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int prod 1/(1+t^2) dmu``; raises ``NotConverged`` if the quadrature fails."""
    res = growth_integral(mu, spec)
    if not res.converged:
        raise NotConverged("growth integral did not converge", res)
    return float(np.real(res.value))


def _rows(v, w):
    """Scale the rows of ``v`` (shape ``(m,)`` or ``(m, p)``) by ``w``."""
    v = np.asarray(v)
    return v * (w if v.ndim == 1 else w[:, None])


class TorusMeasure:
    """Transport of ``mu`` to the torus via the Cayley boundary angle.

    ``dnu = prod 2/(1+t^2) dmu`` with ``s_l`` the angle of ``(t_l-i)/(t_l+i)``.
    """

    def __init__(self, mu: Measure):
        self.mu = mu

    @property
    def dim(self):
        return self.mu.dim

    def integrate(self, f, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
        """Integrate ``f`` (a function of the angles) against the torus measure.

        A ``Separable`` ``f`` stays separable after the change of variables.
        """
        k = self.dim
        if isinstance(f, Separable):
            terms = tuple((c, tuple((lambda t, g=g: _rows(g(boundary_angle(t)), 2.0 * _inv_sq(t)))
                                    for g in facs))
                          for c, facs in f.terms)
            return integrate(self.mu, Separable(terms, k, f.width), spec)

        def pulled(t):
            w = (2.0 ** k) * inverse_square_weight(t)
            v = np.asarray(f(boundary_angle(t)))
            return v * (w[:, None] if v.ndim == 2 else w)

        return integrate(self.mu, pulled, spec)

    def total_mass(self, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        return 2.0 ** self.dim * growth_norm(self.mu, spec)


def transform_to_torus(mu: Measure) -> TorusMeasure:
    return TorusMeasure(mu)


def measure_from_json(obj: dict) -> Measure:
    """Build a measure from its JSON description."""
    kind = obj.get("type")
    if kind == "lebesgue_density":
        return LebesgueDensity(int(obj["k"]), obj.get("density", "one"))
    if kind == "hyperplane":
        return HyperplaneLebesgue(tuple(obj["normal"]), float(obj.get("offset", 0.0)),
                                  float(obj.get("scale", 1.0)))
    if kind == "point_mass":
        return PointMass(tuple(obj["location"]), float(obj.get("weight", 1.0)))
    if kind == "scaled":
        return Scaled(float(obj["factor"]), measure_from_json(obj["inner"]))
    if kind == "sum":
        return Sum(tuple(measure_from_json(t) for t in obj.get("terms", [])), obj.get("k"))
    raise DomainError(f"unknown measure type {kind!r}")


MEASURE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "hnkit:measure",
    "$defs": {
        "measure": {
            "oneOf": [
                {"type": "object", "required": ["type", "k"],
                 "properties": {"type": {"const": "lebesgue_density"},
                                "k": {"type": "integer", "minimum": 1},
                                "density": {"enum": sorted(DENSITIES)}}},
                {"type": "object", "required": ["type", "normal"],
                 "properties": {"type": {"const": "hyperplane"},
                                "normal": {"type": "array", "items": {"type": "number"},
                                           "minItems": 1},
                                "offset": {"type": "number"},
                                "scale": {"type": "number", "exclusiveMinimum": 0}}},
                {"type": "object", "required": ["type", "location"],
                 "properties": {"type": {"const": "point_mass"},
                                "location": {"type": "array", "items": {"type": "number"},
                                             "minItems": 1},
                                "weight": {"type": "number", "exclusiveMinimum": 0}}},
                {"type": "object", "required": ["type", "factor", "inner"],
                 "properties": {"type": {"const": "scaled"},
                                "factor": {"type": "number", "minimum": 0},
                                "inner": {"$ref": "#/$defs/measure"}}},
                {"type": "object", "required": ["type"],
                 "properties": {"type": {"const": "sum"},
                                "k": {"type": "integer", "minimum": 1},
                                "terms": {"type": "array", "items": {"$ref": "#/$defs/measure"}}}},
            ]
        }
    },
    "$ref": "#/$defs/measure",
}
