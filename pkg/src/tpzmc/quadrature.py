"""Vectorised adaptive Gauss-Kronrod (G7/K15) quadrature.

Integrands map a 1-d array of abscissae to an array of shape ``(n, m)``
(real or complex).  Intervals are bisected globally by largest error
estimate until the summed estimate falls below the tolerance.
"""
import heapq

import numpy as np

from .errors import QuadratureError

# QUADPACK qk15 abscissae (non-negative half) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss points are the odd-indexed Kronrod abscissae (1, 3, 5, centre).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]


def gk15(f, a, b):
    """Kronrod estimate and error bound on each of the intervals ``[a_i, b_i]``.

    Returns ``(values, errors)`` with ``values`` of shape ``(k, m)`` and
    ``errors`` of shape ``(k,)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    fx = fx.reshape(len(a), 15, -1)
    kron = np.einsum("j,kjm->km", KRONROD_WEIGHTS, fx) * half[:, None]
    gauss = np.einsum("j,kjm->km", GAUSS_WEIGHTS, fx) * half[:, None]
    err = np.max(np.abs(kron - gauss), axis=1)
    return kron, err


def adaptive_gk(f, a, b, tol=1e-10, rtol=0.0, max_intervals=4000, initial=1):
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    The error estimate is the raw |K15 - G7| difference, which is very
    conservative for smooth integrands.  Raises :class:`QuadratureError`
    carrying the worst interval when ``max_intervals`` is exhausted.
    """
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.reshape(1, -1).shape[1], dtype=probe.dtype), 0.0
    edges = np.linspace(a, b, initial + 1)
    vals, errs = gk15(f, edges[:-1], edges[1:])
    tick = iter(range(1 << 62))
    heap = [(-errs[i], next(tick), edges[i], edges[i + 1], vals[i]) for i in range(initial)]
    heapq.heapify(heap)
    total = vals.sum(axis=0)
    total_err = float(errs.sum())
    count = initial
    while total_err > max(tol, rtol * float(np.max(np.abs(total)))):
        if count >= max_intervals:
            worst = heap[0]
            raise QuadratureError(
                f"adaptive quadrature did not converge on [{a}, {b}]: "
                f"error estimate {total_err:.3e} > {tol:.1e}",
                worst_segment=(worst[2], worst[3]),
                error_estimate=total_err,
            )
        # Split a batch of the worst intervals at once to keep numpy busy.
        batch = [heapq.heappop(heap) for _ in range(min(len(heap), 8))]
        lo = np.array([iv[2] for iv in batch])
        hi = np.array([iv[3] for iv in batch])
        mid = 0.5 * (lo + hi)
        new_vals, new_errs = gk15(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        for iv in batch:
            total = total - iv[4]
            total_err += iv[0]
        n = len(batch)
        for i in range(n):
            for j, (l, r) in ((i, (lo[i], mid[i])), (i + n, (mid[i], hi[i]))):
                heapq.heappush(heap, (-new_errs[j], next(tick), l, r, new_vals[j]))
                total = total + new_vals[j]
                total_err += new_errs[j]
        count += n
    # Re-sum from the leaves to shed accumulated cancellation error.
    total = np.sum([iv[4] for iv in heap], axis=0)
    total_err = float(sum(-iv[0] for iv in heap))
    return total, total_err


def gauss_legendre_composite(f, a, b, panels, order=10):
    """Fixed composite Gauss-Legendre rule; an independent reference."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    fx = np.asarray(f(nodes)).reshape(panels, order, -1)
    return np.einsum("j,kjm,k->m", w, fx, half)
