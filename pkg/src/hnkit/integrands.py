"""Separable integrands built from the closed-form kernels.

Each builder takes a batch ``Z`` of shape ``(p, n)`` and returns a
``Separable`` whose columns are the integrand at the rows of ``Z``.
"""
from __future__ import annotations

import numpy as np

from .kernels import N_raw, kernel_factors
from .measures import Separable

I = 1j


def _inv_sq(s):
    return 1.0 / (1.0 + s * s)


def _col(s):
    return s[:, None]


def feature_hints(Z) -> tuple:
    """Per axis, the real part and imaginary size of the row closest to the real axis."""
    Z = np.asarray(Z, dtype=complex)
    rows = np.argmin(np.abs(Z.imag), axis=0)
    return tuple((float(Z[r, ell].real), float(abs(Z[r, ell].imag))) for ell, r in enumerate(rows))


def kernel(Z) -> Separable:
    """Columns ``K_n(Z[r], t)``."""
    Z = np.asarray(Z, dtype=complex)
    p, n = Z.shape
    head = tuple((lambda s, c=Z[:, ell]: kernel_factors(c[None, :], _col(s)) / (2 * I))
                 for ell in range(n))
    tail = (_inv_sq,) * n
    return Separable(((2 * I, head), (-I, tail)), n, p, feature_hints(Z))


def kernel_derivative(Z, ell: int, rel_step: float = 1e-4) -> Separable:
    """Central difference of ``K_n`` in coordinate ``ell`` (1-based), taken under the integral.

    The step is ``rel_step * |z_ell|`` per row.
    """
    Z = np.asarray(Z, dtype=complex)
    p, n = Z.shape
    j = ell - 1
    h = rel_step * np.abs(Z[:, j])
    factors = []
    for m in range(n):
        if m == j:
            factors.append(lambda s, c=Z[:, m], h=h: (
                kernel_factors((c + h)[None, :], _col(s))
                - kernel_factors((c - h)[None, :], _col(s))) / (2 * h[None, :] * 2 * I))
        else:
            factors.append(lambda s, c=Z[:, m]: kernel_factors(c[None, :], _col(s)) / (2 * I))
    return Separable(((2 * I, tuple(factors)),), n, p, feature_hints(Z))


def poisson(Z) -> Separable:
    Z = np.asarray(Z, dtype=complex)
    p, n = Z.shape
    facs = tuple((lambda s, c=Z[:, ell]: (c.imag[None, :] / np.abs(_col(s) - c[None, :]) ** 2)
                  .astype(complex)) for ell in range(n))
    return Separable(((1.0, facs),), n, p, feature_hints(Z))


def rho_products(rhos, Z) -> Separable:
    """Columns ``prod_j N_{rho_j}(z_j, t_j)`` for every (rho, z) pair, rho-major."""
    Z = np.asarray(Z, dtype=complex)
    p, n = Z.shape
    R = np.array([tuple(r) for r in rhos], dtype=int).reshape(-1, n)
    Zc = np.tile(Z, (len(R), 1))
    Rc = np.repeat(R, p, axis=0)

    def factor(s, ell):
        out = np.empty((len(s), len(Zc)), dtype=complex)
        for r in (-1, 0, 1):
            cols = Rc[:, ell] == r
            if cols.any():
                out[:, cols] = N_raw(r, Zc[cols, ell][None, :], _col(s))
        return out

    facs = tuple((lambda s, ell=ell: factor(s, ell)) for ell in range(n))
    return Separable(((1.0, facs),), n, len(Zc), feature_hints(Z))


def moments(M) -> Separable:
    """Columns ``prod ((t-i)/(t+i))^{m_l} / (1+t_l^2)`` for the rows of ``M``."""
    M = np.asarray(M, dtype=int)
    q, n = M.shape
    facs = tuple((lambda s, e=M[:, ell]: ((_col(s) - I) / (_col(s) + I)) ** e[None, :]
                  * _col(_inv_sq(s))) for ell in range(n))
    return Separable(((1.0, facs),), n, q)


def torus_characters(M) -> Separable:
    """Columns ``exp(i m . s)`` as functions of the torus angles."""
    M = np.asarray(M, dtype=int)
    q, n = M.shape
    facs = tuple((lambda s, e=M[:, ell]: np.exp(I * _col(s) * e[None, :])) for ell in range(n))
    return Separable(((1.0, facs),), n, q)


def pluriharmonic(Z, j1: int, j2: int) -> Separable:
    """Columns of the mixed second-order integrand for the index pair ``(j1, j2)``."""
    Z = np.asarray(Z, dtype=complex)
    p, n = Z.shape
    facs = []
    for ell in range(1, n + 1):
        c = Z[:, ell - 1]
        if ell == j1:
            facs.append(lambda s, c=c: (_col(s) - c[None, :]) ** -2)
        elif ell == j2:
            facs.append(lambda s, c=c: (_col(s) - np.conj(c)[None, :]) ** -2)
        else:
            facs.append(lambda s, c=c: 1.0 / (_col(s) - c[None, :])
                        - 1.0 / (_col(s) - np.conj(c)[None, :]))
    return Separable(((1.0, tuple(facs)),), n, p, feature_hints(Z))


def box_probe(n: int, radii) -> Separable:
    """Columns ``prod 1/(1 + (t/R)^2)``, smooth stand-ins for boxes of size ``R``."""
    radii = np.asarray(radii, dtype=float)
    facs = tuple((lambda s: 1.0 / (1.0 + (_col(s) / radii[None, :]) ** 2) + 0j) for _ in range(n))
    return Separable(((1.0, facs),), n, len(radii))
