"""Domain points, index sets, sign vectors and coordinate classification.

Indices exposed through this module are 1-based, so that reports line up with
the usual ``{1, ..., n}`` notation. Internally numpy arrays are 0-based; the
helpers here do the translation.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

EPS_CLS = 1e-12


class HNKitError(Exception):
    """Base class for all library errors."""


class DomainError(HNKitError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PreconditionError(HNKitError, ValueError):
    """A documented precondition of an operation does not hold."""


class NotConverged(HNKitError, RuntimeError):
    """A quadrature stopped before meeting its tolerance.

    ``self.result`` carries the best estimate found.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NoConvergence(HNKitError, RuntimeError):
    """An extrapolated limit did not settle along its ladder.

    The best available estimate is kept on ``self.estimate`` together with the
    full report on ``self.report``.
    """

    def __init__(self, message, estimate=None, report=None):
        super().__init__(message)
        self.estimate = estimate
        self.report = report


def as_points(z, n: int | None = None) -> np.ndarray:
    """Coerce ``z`` to a complex array whose last axis holds coordinates."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if n is not None and arr.shape[-1] != n:
        raise DomainError(f"expected {n} coordinates, got {arr.shape[-1]}")
    return arr


@dataclass(frozen=True)
class OffRealPoint:
    """A point of ``(C \\ R)^n``."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if len(coords) < 1:
            raise DomainError("a point needs at least one coordinate")
        if any(c.imag == 0 or not np.isfinite(c) for c in coords):
            raise DomainError(f"coordinates must be finite and off the real axis: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def conjugate(self) -> "OffRealPoint":
        return type(self)(tuple(c.conjugate() for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class UpperPoint(OffRealPoint):
    """A point of the poly-upper half-plane."""

    def __post_init__(self):
        super().__post_init__()
        if any(c.imag <= 0 for c in self.coords):
            raise DomainError(f"all coordinates need positive imaginary part: {self.coords}")

    def conjugate(self) -> OffRealPoint:
        return OffRealPoint(tuple(c.conjugate() for c in self.coords))


@dataclass(frozen=True)
class IndexSet:
    """A subset ``B`` of ``{1, ..., n}``."""

    n: int
    members: frozenset

    def __init__(self, n: int, members: Iterable[int] = ()):
        members = frozenset(int(m) for m in members)
        if any(m < 1 or m > n for m in members):
            raise DomainError(f"index set {sorted(members)} not inside 1..{n}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "members", members)

    @classmethod
    def all_but(cls, n: int, ell: int) -> "IndexSet":
        """The set ``B_ell = {1, ..., n} \\ {ell}``."""
        return cls(n, (m for m in range(1, n + 1) if m != ell))

    def complement(self) -> "IndexSet":
        return IndexSet(self.n, (m for m in range(1, self.n + 1) if m not in self.members))

    @property
    def k(self) -> int:
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        for m in self.members:
            out[m - 1] = True
        return out

    def __contains__(self, item):
        return item in self.members

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class RhoVector:
    """Sign vector in ``{-1, 0, 1}^n``."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e not in (-1, 0, 1) for e in entries):
            raise DomainError(f"rho entries must be -1, 0 or 1: {entries}")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def has_plus(self) -> bool:
        return 1 in self.entries

    @property
    def has_minus(self) -> bool:
        return -1 in self.entries

    @property
    def admissible(self) -> bool:
        return self.has_plus and self.has_minus

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class SymmetryClassification:
    """Partition of the coordinates of an off-real point.

    ``c_plus``/``c_minus`` hold coordinates in the upper/lower half-plane other
    than ``i``/``-i``; ``i_plus``/``i_minus`` hold coordinates equal to ``i``/``-i``
    up to ``eps``.
    """

    c_plus: IndexSet
    i_plus: IndexSet
    i_minus: IndexSet
    c_minus: IndexSet
    eps: float = EPS_CLS

    @property
    def n(self) -> int:
        return self.c_plus.n

    def as_dict(self) -> dict:
        return {
            "C+": self.c_plus.sorted(),
            "I+": self.i_plus.sorted(),
            "I-": self.i_minus.sorted(),
            "C-": self.c_minus.sorted(),
            "eps": self.eps,
        }


def classify(z, eps: float = EPS_CLS) -> SymmetryClassification:
    """Split the coordinates of ``z`` into C+, I+, I-, C-."""
    point = z if isinstance(z, OffRealPoint) else OffRealPoint(tuple(as_points(z)))
    n = point.n
    groups = {"cp": [], "ip": [], "im": [], "cm": []}
    for ell, c in enumerate(point.coords, start=1):
        if abs(c - 1j) <= eps:
            groups["ip"].append(ell)
        elif abs(c + 1j) <= eps:
            groups["im"].append(ell)
        elif c.imag > 0:
            groups["cp"].append(ell)
        else:
            groups["cm"].append(ell)
    return SymmetryClassification(
        IndexSet(n, groups["cp"]),
        IndexSet(n, groups["ip"]),
        IndexSet(n, groups["im"]),
        IndexSet(n, groups["cm"]),
        eps,
    )


def enumerate_admissible_rho(n: int) -> list[RhoVector]:
    """All rho in {-1,0,1}^n containing both +1 and -1, lexicographically."""
    if n < 1:
        raise DomainError("n must be at least 1")
    out = []
    for entries in itertools.product((-1, 0, 1), repeat=n):
        if 1 in entries and -1 in entries:
            out.append(RhoVector(entries))
    return out


def admissible_count(n: int) -> int:
    return 3**n - 2 * 2**n + 1


def slot_fill(value: complex, j: int, n: int, fill: complex = 1j) -> np.ndarray:
    """Point with ``value`` at 1-based slot ``j`` and ``fill`` everywhere else."""
    if not 1 <= j <= n:
        raise DomainError(f"slot {j} not inside 1..{n}")
    out = np.full(n, fill, dtype=complex)
    out[j - 1] = value
    return out


def scatter(n: int, positions: IndexSet | Sequence[int], values, fill: complex = 1j) -> np.ndarray:
    """Positional scatter: ``values`` go to 1-based ``positions``, ``fill`` elsewhere."""
    out = np.full(n, fill, dtype=complex)
    idx = [p - 1 for p in positions]
    out[idx] = np.asarray(values, dtype=complex)
    return out


@dataclass(frozen=True)
class NonTangentialPath:
    """Ladder of sample points approaching ``anchor`` inside a Stoltz sector.

    Points are ``anchor + r * exp(i * direction)``; for the infinite anchor
    they are ``r * exp(i * direction)`` with ``r`` growing. ``direction``
    defaults to ``pi/2`` (the imaginary ray) and must lie in
    ``[angle, pi - angle]``.
    """

    anchor: float
    ladder: tuple
    angle: float = np.pi / 2
    direction: float = np.pi / 2

    def __post_init__(self):
        if not 0 < self.angle <= np.pi / 2:
            raise DomainError("Stoltz angle must lie in (0, pi/2]")
        if not self.angle - 1e-15 <= self.direction <= np.pi - self.angle + 1e-15:
            raise DomainError("path direction leaves the Stoltz sector")
        ladder = tuple(float(r) for r in self.ladder)
        if len(ladder) < 2 or any(r <= 0 for r in ladder):
            raise DomainError("ladder needs at least two positive scales")
        steps = np.diff(ladder)
        if self.infinite:
            if np.any(steps <= 0):
                raise DomainError("ladder towards infinity must increase")
        elif np.any(steps >= 0):
            raise DomainError("ladder towards a finite anchor must decrease")
        object.__setattr__(self, "ladder", ladder)

    @property
    def infinite(self) -> bool:
        return np.isinf(self.anchor)

    @classmethod
    def to_infinity(cls, kmin: int = 3, kmax: int = 12, **kw) -> "NonTangentialPath":
        return cls(np.inf, tuple(2.0**k for k in range(kmin, kmax + 1)), **kw)

    @classmethod
    def to_point(cls, t0: float = 0.0, kmin: int = 3, kmax: int = 12, **kw) -> "NonTangentialPath":
        return cls(float(t0), tuple(2.0**-k for k in range(kmin, kmax + 1)), **kw)

    def points(self) -> np.ndarray:
        r = np.asarray(self.ladder)
        offset = r * np.exp(1j * self.direction)
        return offset if self.infinite else self.anchor + offset


def thread_count() -> int:
    """Worker cap taken from ``HNKIT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("HNKIT_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(func: Callable, items: Sequence) -> list:
    """``map`` that may use threads but always returns results in input order."""
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def random_points(rng: np.random.Generator, count: int, n: int,
                  re=(-3.0, 3.0), im=(0.5, 4.0), signs=None) -> np.ndarray:
    """Random points with prescribed half-plane signs per coordinate."""
    x = rng.uniform(re[0], re[1], size=(count, n))
    y = rng.uniform(im[0], im[1], size=(count, n))
    if signs is not None:
        y = y * np.asarray(signs, dtype=float)
    return x + 1j * y


def components(n: int) -> list[tuple]:
    """Sign patterns of the 2^n connected components, upper component first."""
    return list(itertools.product((1, -1), repeat=n))
