"""Richardson extrapolation of sampled limits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import NoConvergence


@dataclass
class LimitReport:
    """Outcome of an extrapolated limit.

    ``tableau[i][j]`` is the Neville value built from samples ``i-j..i``;
    ``diagonal`` holds the successive best extrapolants.
    """

    value: complex
    error_estimate: float
    h: np.ndarray
    samples: np.ndarray
    diagonal: np.ndarray
    converged: bool
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "value": [float(np.real(self.value)), float(np.imag(self.value))],
            "error_estimate": float(self.error_estimate),
            "h": [float(x) for x in self.h],
            "samples": [[float(np.real(s)), float(np.imag(s))] for s in self.samples],
            "converged": bool(self.converged),
            "warnings": list(self.warnings),
        }


def neville_tableau(h, values, max_order: int | None = None) -> list[list[complex]]:
    """Polynomial extrapolation tableau to ``h = 0``."""
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=complex)
    m = len(h)
    depth = m if max_order is None else min(m, max_order + 1)
    tab = [[values[i]] for i in range(m)]
    for i in range(m):
        for j in range(1, min(i, depth - 1) + 1):
            hi, hj = h[i], h[i - j]
            tab[i].append((hj * tab[i][j - 1] - hi * tab[i - 1][j - 1]) / (hj - hi))
    return tab


def richardson(h, values, *, max_order: int = 4, tol: float = 1e-3) -> LimitReport:
    """Extrapolate ``values`` sampled at step sizes ``h`` to ``h -> 0``.

    Each row of the tableau contributes its highest-order entry; the pair of
    consecutive rows whose entries agree best gives the estimate, and their
    difference is the error estimate.

    Raises
    ------
    NoConvergence
        If the best agreement exceeds ``tol * (1 + |estimate|)``.
    """
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=complex)
    if len(h) < 3:
        raise ValueError("need at least three samples to extrapolate")
    order = np.argsort(-h, kind="stable")
    h, values = h[order], values[order]
    tab = neville_tableau(h, values, max_order)
    diag = np.array([row[-1] for row in tab])
    diffs = np.abs(np.diff(diag))
    # prefer later rows on ties: they use smaller h
    best = len(diffs) - 1 - int(np.argmin(diffs[::-1]))
    value = diag[best + 1]
    err = float(diffs[best])
    ok = bool(np.isfinite(value)) and err <= tol * (1.0 + abs(value))
    report = LimitReport(complex(value), err, h, values, diag, ok)
    if not ok:
        raise NoConvergence(f"extrapolants disagree by {err:.3g}", complex(value), report)
    return report
