r"""Closed-form kernels of the n-variable representation.

All functions broadcast: ``z`` and ``t`` are arrays whose last axis runs over
the ``n`` coordinates, and products are taken over that axis. A scalar
kernel value therefore has the broadcast shape of ``z[..., 0]`` and
``t[..., 0]``.

The representation kernel is

    K_n(z, t) = i * ( 2/(2i)^n * prod(1/(t-z) - 1/(t+i))
                      - 1/(2i)^n * prod(1/(t-i) - 1/(t+i)) ).

Each factor is evaluated in the cancellation-free form
``(z+i) / ((t-z)(t+i))`` and ``2i / (1+t^2)`` respectively.
"""
from __future__ import annotations

import numpy as np

from .core import DomainError, enumerate_admissible_rho, RhoVector

I = 1j


def _check_off_real(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("kernel argument has a real coordinate")
    return z


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("t must be finite")
    return t


def kernel_factors(z, t):
    """Per-coordinate factors ``1/(t-z) - 1/(t+i)`` in stable form."""
    return (z + I) / ((t - z) * (t + I))


def K_raw(z, t):
    """Unchecked, broadcasting ``K_n``; ``n`` is the length of the last axis."""
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    n = np.broadcast_shapes(z.shape, t.shape)[-1] if z.ndim or t.ndim else 0
    if n == 0:
        return np.asarray(I)
    a = np.prod(kernel_factors(z, t) / (2 * I), axis=-1)
    b = np.prod(1.0 / (1.0 + t * t), axis=-1)
    return I * (2 * a - b)


def K_times_jacobian(z, t):
    """``K_n(z,t) * prod(1 + t^2)``, bounded in ``t``; used by the quadrature."""
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    return I * (2 * np.prod(f_raw(z, t), axis=-1) - 1)


def eval_K(z, t):
    """Evaluate ``K_n(z, t)`` at an off-real ``z`` and real ``t``.

    ``z = ()`` and ``t = ()`` give ``K_0 = i``.
    """
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    if z.size == 0 and t.size == 0:
        return I
    z = _check_off_real(z)
    t = _check_t(t)
    if z.shape[-1] != t.shape[-1]:
        raise DomainError("z and t must have the same dimension")
    if np.any(t == z):
        raise DomainError("t coincides with z")
    out = K_raw(z, t)
    return complex(out) if out.ndim == 0 else out


def poisson_raw(z, t):
    z = np.asarray(z, dtype=complex)
    return np.prod(z.imag / np.abs(t - z) ** 2, axis=-1)


def eval_poisson(z, t):
    """Poisson kernel ``prod Im z / |t - z|^2`` of the poly-upper half-plane."""
    z = np.asarray(z, dtype=complex)
    t = _check_t(t)
    if np.any(z.imag <= 0):
        raise DomainError("Poisson kernel needs every Im z > 0")
    out = poisson_raw(z, t)
    return float(out) if out.ndim == 0 else out


def N_raw(rho_entry: int, z, t):
    """The rational factor indexed by ``rho_entry`` in {-1, 0, 1}."""
    if rho_entry == -1:
        return (z - I) / ((t - z) * (t - I))
    if rho_entry == 0:
        return 2 * I / (1.0 + t * t) + 0 * z
    if rho_entry == 1:
        zc = np.conj(z)
        return -(zc + I) / ((t + I) * (t - zc))
    raise DomainError(f"rho entry must be -1, 0 or 1, got {rho_entry}")


def eval_N(rho_entry: int, z_j, t_j):
    r"""Evaluate a single factor.

    ``-1``: ``1/(t-z) - 1/(t-i)``; ``0``: ``1/(t-i) - 1/(t+i)``;
    ``+1``: ``1/(t+i) - 1/(t-\bar z)``.
    """
    z_j = np.asarray(z_j, dtype=complex)
    t_j = _check_t(t_j)
    if rho_entry in (-1, 1) and np.any(z_j.imag == 0):
        raise DomainError("N factor with nonzero index needs z off the real axis")
    out = N_raw(int(rho_entry), z_j, t_j)
    return complex(out) if np.ndim(out) == 0 else out


def rho_product_raw(rho, z, t):
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    out = 1.0 + 0j
    for j, r in enumerate(rho):
        out = out * N_raw(r, z[..., j], t[..., j])
    return out


def eval_rho_product(rho, z, t):
    """Product over coordinates of the factors selected by ``rho``."""
    rho = rho if isinstance(rho, RhoVector) else RhoVector(tuple(rho))
    z = np.asarray(z, dtype=complex)
    t = _check_t(t)
    if z.shape[-1] != rho.n or t.shape[-1] != rho.n:
        raise DomainError("rho, z and t must share the dimension")
    for j, r in enumerate(rho):
        if r != 0 and np.any(z[..., j].imag == 0):
            raise DomainError("N factor with nonzero index needs z off the real axis")
    out = rho_product_raw(rho.entries, z, t)
    return complex(out) if np.ndim(out) == 0 else out


def admissible_rho_sum_raw(z, t, n: int):
    """Sum of the rho-products over all mixed-sign rho (vectorized)."""
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    # cache the three factor types per coordinate once
    table = [[N_raw(r, z[..., j], t[..., j]) for r in (-1, 0, 1)] for j in range(n)]
    total = 0j
    for rho in enumerate_admissible_rho(n):
        term = 1.0 + 0j
        for j, r in enumerate(rho.entries):
            term = term * table[j][r + 1]
        total = total + term
    return total


def im_K_decomposition_residual(z, t, relative: bool = True):
    """Residual of ``Im K_n = P_n - (2i)^-n * sum_rho prod N``.

    Returns the absolute residual divided by ``|Im K| + P + 1`` when
    ``relative`` is true.
    """
    z = np.asarray(z, dtype=complex)
    t = _check_t(t)
    if np.any(z.imag <= 0):
        raise DomainError("decomposition is stated for the poly-upper half-plane")
    n = z.shape[-1]
    imk = np.imag(K_raw(z, t))
    pois = poisson_raw(z, t)
    tail = admissible_rho_sum_raw(z, t, n) / (2 * I) ** n
    res = np.abs(imk - pois + tail)
    if relative:
        res = res / (np.abs(imk) + pois + 1.0)
    return float(res) if np.ndim(res) == 0 else res


def f_raw(z, t):
    return (z + I) * (t - I) / (2 * I * (t - z))


def eval_f(z, t):
    """Symmetry helper ``(z+i)(t-i) / (2i(t-z))``."""
    z = _check_off_real(z)
    t = _check_t(t)
    if np.any(t == z):
        raise DomainError("t coincides with z")
    out = f_raw(z, t)
    return complex(out) if np.ndim(out) == 0 else out


def cayley(z):
    """Map the upper half-plane onto the unit disk: ``(z-i)/(z+i)``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -I):
        raise DomainError("cayley transform undefined at -i")
    out = (z - I) / (z + I)
    return complex(out) if out.ndim == 0 else out


def inverse_cayley(w):
    """Inverse map ``i(1+w)/(1-w)``."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 1):
        raise DomainError("inverse cayley transform undefined at 1")
    out = I * (1 + w) / (1 - w)
    return complex(out) if out.ndim == 0 else out


def boundary_angle(t):
    """Angle ``s`` in ``(0, 2pi)`` with ``exp(i s) = (t-i)/(t+i)`` for real ``t``."""
    t = np.asarray(t, dtype=float)
    w = (t - I) ** 2 / (1.0 + t * t)
    return np.mod(np.angle(w), 2 * np.pi)


def kernel_bound_constant(z) -> float:
    """A constant C(z) with ``|K_n(z,t)| <= C(z) prod 1/(1+t^2)``.

    Uses ``|(t-i)/(t-z)| <= sup_t |t-i|/|t-z|``, which for a single
    coordinate is at most ``(|z - i| + |Im z|) / |Im z|``.
    """
    z = _check_off_real(z)
    sup = (np.abs(z - I) + np.abs(z.imag)) / np.abs(z.imag)
    per = np.abs(z + I) / 2 * sup
    return float(2 * np.prod(per) + 1)
