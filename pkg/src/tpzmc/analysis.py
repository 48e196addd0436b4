"""Pointwise analysis of maxfaces and a discrete mean-curvature check on meshes."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ClassificationError, PreconditionError, SingularPointError
from .lorentz import LORENTZ_DIAG
from .weierstrass import LORENTZIAN


class BoundaryKind(str, Enum):
    STRAIGHT_LINE = "straight-line"
    PLANAR_CURVE = "planar-curve"


@dataclass(frozen=True)
class FundamentalForms:
    """Conformal factor of ``ds^2`` and the Hopf coefficient ``Q`` (``II = -2 Re(Q dz^2)``)."""

    metric: float
    second: tuple
    hopf: complex


@dataclass(frozen=True)
class GaussValue:
    point: np.ndarray
    stereo: complex


def _eval(fn, p):
    z = np.array([complex(p.z)])
    w = np.array([complex(p.w)])
    with np.errstate(all="ignore"):
        return complex(np.asarray(fn(z, w)).ravel()[0])


def singular_residual(data, p):
    """``|g(p)| - 1``; zero exactly on the singular set."""
    return abs(_eval(data.g, p)) - 1.0


def nondegenerate_singular(data, p, tol=1e-9, singular_tol=1e-8):
    if abs(singular_residual(data, p)) > singular_tol:
        raise PreconditionError(f"z={p.z} is not on the singular set |g| = 1")
    return abs(_eval(data.dg, p)) > tol


def fold_residual(data, p, eta_tol=1e-14):
    """``Re(dg / (g^2 eta))`` at ``p``; vanishes along fold curves.

    The point need not lie on the singular set (the quantity is then simply
    evaluated), but ``g`` and the coefficient of ``eta`` must be non-zero.
    """
    g = _eval(data.g, p)
    eta = _eval(data.eta, p)
    if not np.isfinite(eta) or abs(eta) <= eta_tol or abs(g) <= eta_tol:
        raise PreconditionError(f"fold residual undefined at z={p.z}")
    return (_eval(data.dg, p) / (g * g * eta)).real


def fold_residuals(data, z, w):
    """Vectorised :func:`fold_residual` over arrays ``z`` and ``w``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    g = data.g(z, w)
    return (data.dg(z, w) / (g * g * data.eta(z, w))).real


def fundamental_forms(data, p):
    g = _eval(data.g, p)
    eta = _eval(data.eta, p)
    if not np.isfinite(eta):
        raise PreconditionError(f"z={p.z} is not a regular point")
    q = eta * _eval(data.dg, p)
    lam = (1.0 - abs(g) ** 2) if data.signature == LORENTZIAN else (1.0 + abs(g) ** 2)
    return FundamentalForms(lam * lam * abs(eta) ** 2, (-2.0 * q.real, 2.0 * q.imag), q)


def hopf_along(data, z, w, dz):
    """Hopf coefficient ``Q`` times ``dz^2`` for sampled points and directions."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return data.eta(z, w) * data.dg(z, w) * np.asarray(dz, dtype=complex) ** 2


def boundary_classify(data, z0, z1, n=64, tol=1e-10):
    """Classify the image of the straight segment ``[z0, z1]`` by the phase of ``Q``.

    Interior Chebyshev nodes are used so branch points at the ends do no harm.
    ``Q dt^2`` purely imaginary gives a straight line, real gives a planar
    curve.  Any branch of ``w`` works since ``Q`` only changes sign.
    """
    x = 0.5 * (1.0 - np.cos(np.pi * (np.arange(n) + 0.5) / n))
    z = z0 + (z1 - z0) * x
    w = np.sqrt(data.domain.p(z))
    q = hopf_along(data, z, w, z1 - z0)
    scale = np.max(np.abs(q))
    if scale == 0.0 or not np.isfinite(scale):
        raise ClassificationError("Hopf differential vanishes or is infinite on the segment")
    off_imag = float(np.max(np.abs(q.real)) / scale)
    off_real = float(np.max(np.abs(q.imag)) / scale)
    if off_imag <= tol:
        return BoundaryKind.STRAIGHT_LINE
    if off_real <= tol:
        return BoundaryKind.PLANAR_CURVE
    raise ClassificationError(
        f"mixed phase on [{z0}, {z1}]: off-imaginary {off_imag:.2e}, off-real {off_real:.2e}"
    )


def gauss_map(data, p, tol=1e-9):
    """Gauss map value on ``H^2`` (sheet ``x0 <= -1`` when ``|g| < 1``) or on ``S^2``."""
    g = _eval(data.g, p)
    return gauss_point(g, data.signature, tol)


def gauss_point(g, signature=LORENTZIAN, tol=1e-9):
    g = complex(g)
    r2 = abs(g) ** 2
    if signature == LORENTZIAN:
        if abs(1.0 - r2) <= tol:
            raise SingularPointError(f"|g| = 1 at g={g}: Gauss map diverges")
        d = 1.0 - r2
        pt = np.array([-(1.0 + r2) / d, 2.0 * g.real / d, 2.0 * g.imag / d])
        return GaussValue(pt, complex(pt[1], pt[2]) / (1.0 - pt[0]))
    d = 1.0 + r2
    pt = np.array([2.0 * g.real / d, 2.0 * g.imag / d, (r2 - 1.0) / d])
    if abs(1.0 - pt[2]) <= tol:
        return GaussValue(pt, complex(np.inf, 0.0))
    return GaussValue(pt, complex(pt[0], pt[1]) / (1.0 - pt[2]))


# --------------------------------------------------------------------------
# Discrete mean curvature


@dataclass
class CurvatureResidual:
    """Per-vertex residual (NaN where not evaluated) and the skipped faces."""

    values: np.ndarray
    degenerate_faces: np.ndarray
    excluded_faces: np.ndarray

    def max(self):
        finite = self.values[np.isfinite(self.values)]
        return float(finite.max()) if finite.size else float("nan")


def boundary_vertices(faces, n_vertices):
    edges = np.sort(np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    mask = np.zeros(n_vertices, dtype=bool)
    mask[uniq[counts == 1].ravel()] = True
    return mask


def mean_curvature_residual(vertices, faces, metric="lorentz", exclude=None, det_tol=1e-20):
    """Discrete mean-curvature magnitude at interior vertices.

    Linear finite elements with the induced metric of each triangle (which
    may be indefinite) give a stiffness matrix ``K`` and lumped mass ``M``;
    the mean-curvature vector is ``M^-1 K x / 2``.  Its Euclidean length is
    returned.  Vertices on the boundary, or touching an excluded or
    degenerate face, get NaN.

    Parameters
    ----------
    vertices : (n, 3) array
    faces : (m, 3) int array
    metric : {"lorentz", "euclid"}
    exclude : (m,) bool array, optional
        Faces to leave out, e.g. those in the lightlike guard band.
    """
    x = np.asarray(vertices, dtype=float)
    f = np.asarray(faces, dtype=int)
    diag = LORENTZ_DIAG if metric == "lorentz" else np.ones(3)
    e1 = x[f[:, 1]] - x[f[:, 0]]
    e2 = x[f[:, 2]] - x[f[:, 0]]
    g11 = np.einsum("ij,ij,j->i", e1, e1, diag)
    g12 = np.einsum("ij,ij,j->i", e1, e2, diag)
    g22 = np.einsum("ij,ij,j->i", e2, e2, diag)
    det = g11 * g22 - g12 * g12
    scale = np.maximum(np.einsum("ij,ij->i", e1, e1) * np.einsum("ij,ij->i", e2, e2), 1e-300)
    degenerate = np.abs(det) <= det_tol * scale
    skip = degenerate.copy()
    if exclude is not None:
        skip |= np.asarray(exclude, dtype=bool)
    keep = ~skip
    fk = f[keep]
    det_k = det[keep]
    inv = np.stack([g22[keep], -g12[keep], -g12[keep], g11[keep]], axis=1).reshape(-1, 2, 2) / det_k[:, None, None]
    area = 0.5 * np.sqrt(np.abs(det_k))
    grads = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    local = area[:, None, None] * np.einsum("ap,kpq,bq->kab", grads, inv, grads)

    n = len(x)
    lap = np.zeros((n, 3))
    mass = np.zeros(n)
    for a in range(3):
        np.add.at(mass, fk[:, a], area / 3.0)
        for b in range(3):
            np.add.at(lap, fk[:, a], local[:, a, b][:, None] * x[fk[:, b]])
    bad = boundary_vertices(f, n)
    bad[f[skip].ravel()] = True
    bad |= mass == 0.0
    out = np.full(n, np.nan)
    ok = ~bad
    out[ok] = 0.5 * np.linalg.norm(lap[ok] / mass[ok, None], axis=1)
    return CurvatureResidual(out, np.flatnonzero(degenerate), np.flatnonzero(skip & ~degenerate))


def convergence_order(h1, r1, h2, r2):
    """Observed order ``log(r1/r2) / log(h1/h2)``."""
    return float(np.log(r1 / r2) / np.log(h1 / h2))
