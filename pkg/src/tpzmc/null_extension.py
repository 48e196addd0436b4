"""Null singular curves, their timelike extensions, and the re-extension step.

For the Schwarz-H-type maxface the image of the fold ``|z| = 1`` is the null
curve

    gamma(s) = int_0^s (1, -cos t, -sin t) xi(t) dt,
    xi(t)    = 2 / sqrt(2 cos 3t + a^3 + a^-3),

and the timelike minimal extension is ``(gamma(u+v) + gamma(u-v)) / 2``.
"""
from functools import lru_cache
import math

import numpy as np

from .errors import ParameterError
from .lorentz import minkowski_inner

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)

SQRT3 = math.sqrt(3.0)


def _check_a(a):
    if not 0.0 < a < 1.0:
        raise ParameterError(f"a must lie in (0, 1), got {a}")


def xi(t, a):
    """Speed factor of the fold curve; positive for every real ``t`` when ``0 < a < 1``."""
    _check_a(a)
    t = np.asarray(t, dtype=float)
    return 2.0 / np.sqrt(2.0 * np.cos(3.0 * t) + a**3 + a**-3)


def xi_prime(t, a):
    t = np.asarray(t, dtype=float)
    radicand = 2.0 * np.cos(3.0 * t) + a**3 + a**-3
    return 6.0 * np.sin(3.0 * t) * radicand**-1.5


def xi_hat(s, a):
    """``xi(s + pi)``, the speed factor of the upper fold curve."""
    return xi(np.asarray(s, dtype=float) + np.pi, a)


class NullCurve:
    """A curve known through its velocity, tabulated once and evaluated exactly.

    Values at the nodes ``s_k = k h`` come from a cumulative 12-point
    Gauss-Legendre rule per cell; off-node values add a local Gauss-Legendre
    integral from the nearest node.  ``gamma(0) = 0``.

    Parameters
    ----------
    velocity : callable
        Maps an array of ``s`` to an ``(n, 3)`` array of ``gamma'(s)``.
    s_min, s_max : float
        Table range; evaluation outside it raises ``ValueError``.
    acceleration : callable, optional
        ``gamma''``; when omitted it is not available.
    """

    def __init__(self, velocity, s_min, s_max, h=np.pi / 3000, acceleration=None, label=None):
        self.velocity = velocity
        self.acceleration = acceleration
        self.label = label
        self.h = float(h)
        k_lo = math.floor(s_min / h)
        k_hi = math.ceil(s_max / h)
        self.nodes = np.arange(k_lo, k_hi + 1) * self.h
        self.s_min = float(self.nodes[0])
        self.s_max = float(self.nodes[-1])
        cells = self._cell_integrals(self.nodes[:-1], self.nodes[1:])
        zero = -k_lo
        table = np.zeros((len(self.nodes), 3))
        table[zero + 1:] = np.cumsum(cells[zero:], axis=0)
        table[:zero] = -np.cumsum(cells[:zero][::-1], axis=0)[::-1]
        self.table = table

    def _cell_integrals(self, lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        vals = self.velocity(x).reshape(len(lo), len(_GL_X), 3)
        return np.einsum("j,kjm,k->km", _GL_W, vals, half)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        if flat.size and (flat.min() < self.s_min - 1e-12 or flat.max() > self.s_max + 1e-12):
            raise ValueError(f"s outside the tabulated range [{self.s_min}, {self.s_max}]")
        k = np.clip(np.rint((flat - self.nodes[0]) / self.h).astype(int), 0, len(self.nodes) - 1)
        out = self.table[k] + self._cell_integrals(self.nodes[k], flat)
        return out.reshape(s.shape + (3,))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        return self.velocity(s.ravel()).reshape(s.shape + (3,))

    def second_derivative(self, s):
        if self.acceleration is None:
            raise NotImplementedError("no closed-form acceleration for this curve")
        s = np.asarray(s, dtype=float)
        return self.acceleration(s.ravel()).reshape(s.shape + (3,))

    def extend(self, u, v):
        """Timelike minimal extension ``(gamma(u+v) + gamma(u-v)) / 2``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return 0.5 * (self(u + v) + self(u - v))

    def extend_derivatives(self, u, v):
        """``(f_u, f_v)`` of the extension from the closed-form velocity."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        gp = self.derivative(u + v)
        gm = self.derivative(u - v)
        return 0.5 * (gp + gm), 0.5 * (gp - gm)


def _schwarz_h_velocity(a):
    def velocity(t):
        x = xi(t, a)
        return np.stack([x, -np.cos(t) * x, -np.sin(t) * x], axis=-1)

    def acceleration(t):
        x = xi(t, a)
        xp = xi_prime(t, a)
        c, s = np.cos(t), np.sin(t)
        return np.stack([xp, -c * xp + s * x, -s * xp - c * x], axis=-1)

    return velocity, acceleration


@lru_cache(maxsize=32)
def schwarz_h_null_curve(a, h=np.pi / 3000):
    """Fold curve of the Schwarz-H-type maxface, tabulated over ``[-3 pi, 3 pi]``."""
    _check_a(a)
    vel, acc = _schwarz_h_velocity(a)
    return NullCurve(vel, -3 * np.pi, 3 * np.pi, h=h, acceleration=acc, label=f"schwarz-h a={a}")


def gamma(s, a):
    return schwarz_h_null_curve(a)(s)


def gamma_prime(s, a):
    vel, _ = _schwarz_h_velocity(a)
    s = np.asarray(s, dtype=float)
    return vel(s.ravel()).reshape(s.shape + (3,))


def timelike_extend(a, u, v):
    return schwarz_h_null_curve(a).extend(u, v)


def sigma(a, s):
    """Upper fold curve ``f*(s, pi)``."""
    s = np.asarray(s, dtype=float)
    return timelike_extend(a, s, np.full(s.shape, np.pi))


def sigma_prime(a, s):
    """``(1, cos s, sin s) xi_hat(s)``, the closed-form derivative of :func:`sigma`."""
    s = np.asarray(s, dtype=float)
    x = xi_hat(s, a)
    return np.stack([x, np.cos(s) * x, np.sin(s) * x], axis=-1)


def matrix_A():
    """Reflection relating the two fold curves: ``sigma'(s) = A gamma'(pi/3 - s)``."""
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    return np.array([[1.0, 0.0, 0.0], [0.0, -c, -s], [0.0, -s, c]])


def translation_c(a):
    """``sigma(0) - A gamma(pi/3)`` and ``f*(0, pi) - A f*(pi/3, 0)``.

    Both expressions are returned so callers can compare them.
    """
    A = matrix_A()
    via_sigma = sigma(a, 0.0) - A @ gamma(np.pi / 3, a)
    via_extension = timelike_extend(a, 0.0, np.pi) - A @ timelike_extend(a, np.pi / 3, 0.0)
    return via_sigma, via_extension


def fold_translation(a):
    """Translation ``c'`` with ``sigma(s) = -A gamma(pi/3 - s) + c'``.

    Integrating ``sigma'(s) = A gamma'(pi/3 - s)`` gives this sign; it is the
    translation that carries the maxface onto the piece beyond ``sigma``.
    """
    return sigma(a, 0.0) + matrix_A() @ gamma(np.pi / 3, a)


def reextend_points(a, points):
    """Image ``-A f + c'`` of maxface points ``f`` (array of shape ``(..., 3)``)."""
    pts = np.asarray(points, dtype=float)
    return -pts @ matrix_A().T + fold_translation(a)


def spacelike_reextend(data, a, path, tol=1e-10):
    """Re-extended spacelike surface at the end of ``path`` (from the base point)."""
    from .weierstrass import surface_point

    return reextend_points(a, surface_point(data, path, tol))


def null_nondegeneracy(curve, s):
    """Ratio of singular values of ``[gamma', gamma'']``; zero means degenerate."""
    gp = np.atleast_2d(curve.derivative(s))
    gpp = np.atleast_2d(curve.second_derivative(s))
    out = []
    for a, b in zip(gp, gpp):
        sv = np.linalg.svd(np.stack([a, b], axis=1), compute_uv=False)
        out.append(sv[-1] / sv[0] if sv[0] > 0 else 0.0)
    return np.array(out) if np.ndim(s) else float(out[0])


def nondegenerate_null_check(curve, s, tol=1e-8):
    """True where ``gamma''`` is not proportional to ``gamma'``."""
    return np.asarray(null_nondegeneracy(curve, s)) > tol


def is_null(curve, s, tol=1e-12):
    v = curve.derivative(s)
    return np.abs(minkowski_inner(v, v)) <= tol
