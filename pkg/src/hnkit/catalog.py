"""Built-in data sets with closed forms, used as oracles throughout."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import NotConverged, as_points
from .kernels import K_raw
from .measures import (DEFAULT_SPEC, HyperplaneLebesgue, LebesgueDensity, PointMass,
                       QuadratureSpec, integrate, lebesgue)
from .representation import RepresentationData

I = 1j


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A named data set with an optional closed form on all of ``(C \\ R)^n``.

    ``closed_form`` maps an ``(m, n)`` array to ``(m,)`` values of ``q``;
    ``pure_form`` does the same for the pure-integral part ``q0``.
    """

    name: str
    n: int
    data: RepresentationData
    closed_form: Callable | None
    pure_form: Callable | None
    admissible: bool
    notes: str = ""
    # components (sign tuples) on which closed_form is valid; None means all
    components: tuple | None = None
    known: dict = field(default_factory=dict)

    def covers(self, signs) -> bool:
        return self.components is None or tuple(signs) in self.components

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n, "admissible": self.admissible,
                "notes": self.notes, "data": self.data.to_json()}


def _rows(Z, n):
    return np.atleast_2d(as_points(Z, n)).reshape(-1, n)


def _const_i(Z, n):
    Z = _rows(Z, n)
    return np.where(np.all(Z.imag > 0, axis=1), I, -I)


def _three_var(Z):
    Z = _rows(Z, 3)
    return 1.0 - 1.0 / Z.sum(axis=1)


def _pair_pure(Z):
    """``q0`` for the line measure in two variables on every component."""
    Z = _rows(Z, 2)
    w1, w2 = Z[:, 0], Z[:, 1]
    up1, up2 = w1.imag > 0, w2.imag > 0
    out = np.empty(len(Z), dtype=complex)
    both = up1 & up2
    out[both] = -1.0 / (w1[both] + w2[both])
    m = up1 & ~up2
    out[m] = 1.0 / (I - w2[m])
    m = ~up1 & up2
    out[m] = 1.0 / (I - w1[m])
    m = ~up1 & ~up2
    out[m] = 1.0 / (I - w1[m]) + 1.0 / (I - w2[m]) + 1.0 / (w1[m] + w2[m])
    return out


def _pair_shifted(Z):
    Z = _rows(Z, 2)
    return 2.0 * Z[:, 1] + _pair_pure(Z)


def _density_axis(w):
    # pi^-1 * int (factor/(2i)) / (1+t^2) dt by residues, per half-plane
    up = w.imag > 0
    out = np.empty_like(w)
    out[up] = (w[up] + 3 * I) / (4 * (w[up] + I))
    out[~up] = (w[~up] + I) / (4 * (w[~up] - I))
    return out


def _density_pure(Z):
    Z = _rows(Z, 2)
    return I * (2 * _density_axis(Z[:, 0]) * _density_axis(Z[:, 1]) - 0.25)


def _reciprocal(Z):
    Z = _rows(Z, 1)
    return -1.0 / Z[:, 0]


def entries() -> list[CatalogEntry]:
    """All built-in entries, in a fixed order."""
    out = []
    for n in (1, 2, 3):
        out.append(CatalogEntry(
            f"const_i_{n}", n, RepresentationData(0.0, (0.0,) * n, lebesgue(n)),
            lambda Z, n=n: _const_i(Z, n), lambda Z, n=n: _const_i(Z, n), True,
            "Lebesgue measure; the function is i on the poly-upper half-plane and -i elsewhere.",
            known={"a": 0.0, "b": [0.0] * n, "c": [0.0] * n}))
    out.append(CatalogEntry(
        "three_var_inverse", 3,
        RepresentationData(1.0, (0.0, 0.0, 0.0), HyperplaneLebesgue((1.0, 1.0, 1.0), 0.0, math.pi)),
        _three_var, lambda Z: _three_var(Z) - 1.0, True,
        "q = 1 - 1/(z1+z2+z3) from pi times surface measure on the plane t1+t2+t3 = 0; "
        "closed form given on the poly-upper half-plane only.",
        components=((1, 1, 1),), known={"a": 1.0, "b": [0.0, 0.0, 0.0], "c": [0.0, 0.0, 0.0]}))
    out.append(CatalogEntry(
        "two_var_shifted", 2,
        RepresentationData(0.0, (0.0, 2.0), HyperplaneLebesgue((1.0, 1.0), 0.0, math.pi)),
        _pair_shifted, _pair_pure, True,
        "q = 2 z2 - 1/(z1+z2); the measure is pi times the line t1+t2 = 0, "
        "certified by the closed-form match on all four components.",
        known={"a": 0.0, "b": [0.0, 2.0], "c": [0.0, 0.0]}))
    out.append(CatalogEntry(
        "nonadmissible_density", 2,
        RepresentationData(0.0, (0.0, 0.0), LebesgueDensity(2, "inv_one_plus_t2_product")),
        _density_pure, _density_pure, False,
        "Density prod 1/(1+t^2); fails the moment condition at m = (1, -1).",
        known={"a": 0.0, "b": [0.0, 0.0]}))
    out.append(CatalogEntry(
        "one_var_reciprocal", 1, RepresentationData(0.0, (0.0,), PointMass((0.0,), math.pi)),
        _reciprocal, _reciprocal, True,
        "q = -1/z; the atom weight pi is the limit of pi (t0 - z) q(z) at t0 = 0.",
        known={"a": 0.0, "b": [0.0], "c": [-1.0], "atom": math.pi}))
    return out


def get(name: str) -> CatalogEntry:
    for e in entries():
        if e.name == name:
            return e
    raise KeyError(f"unknown catalog entry {name!r}; known: {[e.name for e in entries()]}")


def measures() -> dict:
    """The distinct measures of the catalog, keyed by a short label."""
    return {
        "lebesgue_2": lebesgue(2),
        "density_2": LebesgueDensity(2, "inv_one_plus_t2_product"),
        "line_2": HyperplaneLebesgue((1.0, 1.0), 0.0, math.pi),
        "plane_3": HyperplaneLebesgue((1.0, 1.0, 1.0), 0.0, math.pi),
        "lebesgue_3": lebesgue(3),
    }


@dataclass
class CascadeReport:
    z: list
    t_rest: list
    integral: complex
    expected: complex
    residual: float
    error_estimate: float
    branch: str

    def as_dict(self) -> dict:
        return {"z": self.z, "t_rest": self.t_rest,
                "integral": [self.integral.real, self.integral.imag],
                "expected": [self.expected.real, self.expected.imag],
                "residual": self.residual, "error_estimate": self.error_estimate,
                "branch": self.branch}


def residue_cascade_check(n: int, z, t_rest=None, spec: QuadratureSpec = DEFAULT_SPEC) -> CascadeReport:
    """Integrate ``K_n`` over the first coordinate and compare with one step of the cascade.

    For ``z_1`` in the upper half-plane the integral is ``pi K_{n-1}(z', t')``;
    in the lower half-plane it is ``-pi K_{n-1}(i1, t')``, where primes drop
    the first coordinate.

    Raises
    ------
    NotConverged
        If the one-dimensional quadrature misses its tolerance.
    """
    if not 1 <= n <= 3:
        raise ValueError("residue cascade is checked for n = 1, 2, 3")
    z = as_points(z, n)
    t_rest = np.zeros(n - 1) if t_rest is None else np.asarray(t_rest, dtype=float).reshape(n - 1)

    def f(s):
        t = np.concatenate([s, np.broadcast_to(t_rest, (len(s), n - 1))], axis=1)
        return K_raw(z[None, :], t)

    res = integrate(lebesgue(1), f, spec)
    if not res.converged:
        raise NotConverged("cascade integral did not converge", res)
    if z[0].imag > 0:
        expected, branch = math.pi * complex(K_raw(z[1:], t_rest)), "upper"
    else:
        expected, branch = -math.pi * complex(K_raw(np.full(n - 1, I), t_rest)), "lower"
    value = complex(np.atleast_1d(res.value)[0])
    return CascadeReport([[c.real, c.imag] for c in z], t_rest.tolist(), value, expected,
                         abs(value - expected), float(np.atleast_1d(res.error_estimate)[0]), branch)
