"""Batched adaptive tensor Gauss-Kronrod cubature on boxes.

Panels are refined in rounds. Each round picks the panels that carry most of
the excess error, bisects each along the axis with the largest directional
error indicator, and evaluates all children in one vectorized call. Panel
order is fixed by index, so results are bit-reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# Gauss-Kronrod 7/15 (QUADPACK qk15), positive half, descending nodes.
_XGK15 = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK15 = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG7 = np.array([0.0, 0.129484966168869693270611432679082,
                 0.0, 0.279705391489276667901467771423780,
                 0.0, 0.381830050505118944950369775488975,
                 0.0, 0.417959183673469387755102040816327])

# Gauss-Kronrod 3/7, used for k >= 5 to keep the tensor rule small.
_XGK7 = np.array([0.960491268708020283423507092629080,
                  0.774596669241483377035853079956480,
                  0.434243749346802558002071502844628,
                  0.0])
_WGK7 = np.array([0.104656226026467265193823857192073,
                  0.268488089868333440728569280666710,
                  0.401397414775962222905051818618432,
                  0.450916538658474142345110087045571])
_WG3 = np.array([0.0, 0.555555555555555555555555555555556,
                 0.0, 0.888888888888888888888888888888889])


def _full(x_half, w_half):
    """Mirror a positive-half table onto [-1, 1]."""
    x = np.concatenate([-x_half[:-1], x_half[::-1]])
    w = np.concatenate([w_half[:-1], w_half[::-1]])
    return x, w


@dataclass(frozen=True)
class Rule1D:
    nodes: np.ndarray
    kronrod: np.ndarray
    gauss: np.ndarray


def rule_1d(order: int = 15) -> Rule1D:
    if order == 15:
        x, wk = _full(_XGK15, _WGK15)
        _, wg = _full(_XGK15, _WG7)
    elif order == 7:
        x, wk = _full(_XGK7, _WGK7)
        _, wg = _full(_XGK7, _WG3)
    else:
        raise ValueError("supported Kronrod orders are 7 and 15")
    return Rule1D(x, wk, wg)


class TensorRule:
    """Tensor-product Kronrod rule with embedded Gauss and per-axis indicators."""

    def __init__(self, k: int, order: int | None = None):
        if order is None:
            order = 15 if k <= 4 else 7
        r = rule_1d(order)
        self.k = k
        self.q = len(r.nodes) ** k
        grids = np.meshgrid(*([r.nodes] * k), indexing="ij")
        self.nodes = np.stack([g.ravel() for g in grids], axis=-1) if k else np.zeros((1, 0))

        def outer(ws):
            out = np.ones(1)
            for w in ws:
                out = np.multiply.outer(out, w).ravel()
            return out

        self.wk = outer([r.kronrod] * k)
        self.wg = outer([r.gauss] * k)
        diff = r.kronrod - r.gauss
        # directional indicators: Kronrod everywhere except the difference on axis d
        self.wd = np.stack([outer([diff if a == d else r.kronrod for a in range(k)])
                            for d in range(k)]) if k else np.zeros((0, 1))


@dataclass
class CubatureResult:
    value: np.ndarray
    error: np.ndarray
    panels: int
    converged: bool
    evaluations: int
    boxes: tuple | None = None


_EPS = np.finfo(float).eps


def _scaled_error(raw, asc):
    """QUADPACK's sharpening of the Kronrod-Gauss difference."""
    out = raw.copy()
    ok = (asc > 0) & (raw > 0)
    out[ok] = asc[ok] * np.minimum(1.0, (200.0 * raw[ok] / asc[ok]) ** 1.5)
    return out


def adaptive_cubature(f, lo, hi, *, rel_tol=1e-8, abs_tol=1e-12, max_panels=10**6,
                      initial_divisions=None, budget=4_000_000, order=None,
                      keep_boxes=False) -> CubatureResult:
    """Integrate ``f`` over the box ``[lo, hi]``.

    Parameters
    ----------
    f : callable
        Maps an ``(m, k)`` float array of nodes to an ``(m,)`` or ``(m, p)``
        array (complex allowed).
    lo, hi : array_like
        Box corners, length ``k``.
    rel_tol, abs_tol : float
        Stop when every component satisfies
        ``error <= max(abs_tol, rel_tol * |value|)``.
    max_panels : int
        Hard cap on the number of live panels.
    initial_divisions : int, optional
        Uniform pre-split per axis; defaults to 4 for k <= 2, else 2.
    budget : int
        Soft cap on scalars held per evaluation batch.
    keep_boxes : bool
        Attach the final panel corners, for diagnostics.

    Returns
    -------
    CubatureResult
        ``value`` and ``error`` have shape ``(p,)`` (``p = 1`` for scalar ``f``).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    k = lo.size
    if k == 0:
        v = np.atleast_1d(np.asarray(f(np.zeros((1, 0))), dtype=complex)).reshape(1, -1)[0]
        return CubatureResult(v, np.zeros(v.shape), 0, True, 1)
    rule = TensorRule(k, order)
    if initial_divisions is None:
        initial_divisions = 4 if k <= 2 else 2
    m = initial_divisions
    edges = [np.linspace(lo[d], hi[d], m + 1) for d in range(k)]
    cells = list(itertools.product(range(m), repeat=k))
    plo = np.array([[edges[d][c[d]] for d in range(k)] for c in cells])
    phi = np.array([[edges[d][c[d] + 1] for d in range(k)] for c in cells])

    state = {"width": None, "evals": 0}

    def evaluate(blo, bhi):
        centre = 0.5 * (blo + bhi)
        half = 0.5 * (bhi - blo)
        nb = len(blo)
        width = state["width"] or 1
        chunk = max(1, budget // (rule.q * width))
        ests, errs, axes, rnds = [], [], [], []
        for s in range(0, nb, chunk):
            c = centre[s:s + chunk]
            h = half[s:s + chunk]
            pts = c[:, None, :] + h[:, None, :] * rule.nodes[None, :, :]
            vals = np.asarray(f(pts.reshape(-1, k)))
            if vals.ndim == 1:
                vals = vals[:, None]
            state["width"] = vals.shape[1]
            state["evals"] += vals.shape[0]
            vals = vals.reshape(len(c), rule.q, -1)
            vol = np.prod(h, axis=1)[:, None]
            est_k = np.einsum("q,bqp->bp", rule.wk, vals) * vol
            est_g = np.einsum("q,bqp->bp", rule.wg, vals) * vol
            ind = np.abs(np.einsum("dq,bqp->bdp", rule.wd, vals)).max(axis=2)
            l1 = np.einsum("q,bqp->bp", rule.wk, np.abs(vals)) * vol
            mean = est_k / (vol * rule.wk.sum())
            asc = np.einsum("q,bqp->bp", rule.wk, np.abs(vals - mean[:, None, :])) * vol
            raw = np.abs(est_k - est_g)
            ests.append(est_k)
            errs.append(_scaled_error(raw, asc))
            rnds.append(50 * _EPS * l1)
            axes.append(np.argmax(ind, axis=1))
        return (np.concatenate(ests), np.concatenate(errs),
                np.concatenate(rnds), np.concatenate(axes))

    est, err, rnd, axis = evaluate(plo, phi)
    err = np.maximum(err, rnd)
    refinable = (err > rnd).any(axis=1)
    converged = False
    while True:
        total = est.sum(axis=0)
        total_err = err.sum(axis=0)
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        if np.all(total_err <= tol):
            converged = True
            break
        if len(plo) >= max_panels or not refinable.any():
            break
        badness = (err / tol).max(axis=1)
        badness = np.where(refinable, badness, 0.0)
        order_idx = np.argsort(-badness, kind="stable")
        excess = badness.sum() - 1.0
        cum = np.cumsum(badness[order_idx])
        take = int(np.searchsorted(cum, 0.5 * max(excess, 0.0)) + 1)
        take = max(1, min(take, int((len(plo) + 1)), max_panels - len(plo)))
        take = min(take, int(np.count_nonzero(badness > 0)))
        if take <= 0:
            break
        sel = np.sort(order_idx[:take])
        keep = np.ones(len(plo), dtype=bool)
        keep[sel] = False
        slo, shi, sax = plo[sel], phi[sel], axis[sel]
        mid = 0.5 * (slo[np.arange(take), sax] + shi[np.arange(take), sax])
        lo1, hi1 = slo.copy(), shi.copy()
        hi1[np.arange(take), sax] = mid
        lo2, hi2 = slo.copy(), shi.copy()
        lo2[np.arange(take), sax] = mid
        clo = np.concatenate([lo1, lo2])
        chi = np.concatenate([hi1, hi2])
        e2, r2, n2, a2 = evaluate(clo, chi)
        r2 = np.maximum(r2, n2)
        plo = np.concatenate([plo[keep], clo])
        phi = np.concatenate([phi[keep], chi])
        est = np.concatenate([est[keep], e2])
        err = np.concatenate([err[keep], r2])
        rnd = np.concatenate([rnd[keep], n2])
        axis = np.concatenate([axis[keep], a2])
        refinable = np.concatenate([refinable[keep], (r2 > n2).any(axis=1)])
    boxes = (plo, phi) if keep_boxes else None
    return CubatureResult(est.sum(axis=0), err.sum(axis=0), len(plo), converged, state["evals"], boxes)
