"""Vector arithmetic in Lorentz-Minkowski 3-space and Euclidean 3-space.

Vectors are plain length-3 numpy arrays (or stacks of shape ``(..., 3)``);
the metric is chosen by the function, not by the type.
"""
from enum import Enum

import numpy as np

#: Diagonal of the Lorentzian metric -dx0^2 + dx1^2 + dx2^2.
LORENTZ_DIAG = np.array([-1.0, 1.0, 1.0])
ETA = np.diag(LORENTZ_DIAG)


class CausalClass(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"

    @property
    def code(self):
        return _CAUSAL_CODES[self]


_CAUSAL_CODES = {
    CausalClass.SPACELIKE: 0,
    CausalClass.TIMELIKE: 1,
    CausalClass.LIGHTLIKE: 2,
}


def minkowski_inner(u, v):
    """Lorentzian inner product ``-u0 v0 + u1 v1 + u2 v2`` over the last axis."""
    u = np.asarray(u)
    v = np.asarray(v)
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def euclid_inner(u, v):
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def causal_classify(v, tol=1e-9):
    """Causal character of a single vector from the sign of <v, v>."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    q = float(minkowski_inner(v, v))
    if abs(q) <= tol:
        return CausalClass.LIGHTLIKE
    return CausalClass.TIMELIKE if q < 0 else CausalClass.SPACELIKE


def lorentz_normal(u, v):
    """Vector Lorentz-orthogonal to both ``u`` and ``v``.

    This is ``eta @ (u x v)``; a plane is spacelike iff this normal is
    timelike.
    """
    return np.cross(u, v) * LORENTZ_DIAG


def plane_causal_class(u, v, tol=1e-9):
    """Causal class of the plane spanned by ``u`` and ``v``.

    The normal is normalised in the Euclidean norm before classification so
    ``tol`` is scale free.
    """
    n = lorentz_normal(u, v)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("degenerate plane")
    q = float(minkowski_inner(n, n)) / norm**2
    if abs(q) <= tol:
        return CausalClass.LIGHTLIKE
    # timelike normal <=> spacelike plane
    return CausalClass.SPACELIKE if q < 0 else CausalClass.TIMELIKE


def preserves_minkowski(m, tol=1e-12):
    """True if ``m.T @ eta @ m == eta`` entrywise within ``tol``."""
    m = np.asarray(m, dtype=float)
    return bool(np.max(np.abs(m.T @ ETA @ m - ETA)) <= tol)


def line_rotation(direction, metric="lorentz"):
    """Linear part of the half-turn about a (non-null) line.

    Fixes ``direction`` and negates its orthogonal complement with respect to
    the chosen metric.
    """
    d = np.asarray(direction, dtype=float)
    if metric == "lorentz":
        dd = minkowski_inner(d, d)
        return 2.0 * np.outer(d, d * LORENTZ_DIAG) / dd - np.eye(3)
    return 2.0 * np.outer(d, d) / euclid_inner(d, d) - np.eye(3)


def plane_reflection(normal, metric="lorentz"):
    """Linear part of the reflection in the plane with the given normal.

    For the Lorentzian metric ``normal`` must be the Lorentz normal (see
    :func:`lorentz_normal`) and must not be null.
    """
    n = np.asarray(normal, dtype=float)
    if metric == "lorentz":
        nn = minkowski_inner(n, n)
        return np.eye(3) - 2.0 * np.outer(n, n * LORENTZ_DIAG) / nn
    return np.eye(3) - 2.0 * np.outer(n, n) / euclid_inner(n, n)
