"""Weierstrass-type representations in L^3 and R^3, surface points and periods."""
from dataclasses import dataclass
import cmath

import numpy as np

from .curves import (
    PathSpec,
    SheetPoint,
    end_sheet_value,
    integrate_cumulative,
    integrate_form,
)
from .errors import NotACycleError, PoleError, PreconditionError

LORENTZIAN = "lorentz"
EUCLIDEAN = "euclid"


@dataclass(frozen=True)
class WeierstrassData:
    """Weierstrass data ``(g, eta)`` on a curve or punctured plane.

    ``g``, ``dg`` and ``eta`` are callables of ``(z, w)`` arrays; ``eta``
    returns the coefficient of ``dz``.  ``base_z``/``base_w`` fix the point
    where the surface is normalised to the origin.
    """

    name: str
    signature: str
    g: object
    dg: object
    eta: object
    domain: object
    base_z: complex
    base_w: complex = 1.0 + 0j

    def phi(self, z, w):
        """Coefficient of ``dz`` of the C^3-valued form, shape ``(n, 3)``."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        g = self.g(z, w)
        eta = self.eta(z, w)
        if self.signature == LORENTZIAN:
            return np.stack([-2 * g * eta, (1 + g * g) * eta, 1j * (1 - g * g) * eta], axis=-1)
        return np.stack([(1 - g * g) * eta, 1j * (1 + g * g) * eta, 2 * g * eta], axis=-1)

    @property
    def base(self):
        return SheetPoint(complex(self.base_z), complex(self.base_w))

    def path_from_base(self, points, branch_end=False):
        return PathSpec.polyline([self.base_z] + list(points), branch_end=branch_end)


def _point_phi(data, p, signature):
    if data.signature != signature:
        raise PreconditionError(f"data {data.name!r} is not {signature}")
    with np.errstate(all="ignore"):
        val = data.phi(np.array([p.z]), np.array([p.w]))[0]
    if not np.all(np.isfinite(val)):
        raise PoleError(f"Weierstrass form has a pole at z={p.z}")
    return val


def phi_lorentz(data, p):
    return _point_phi(data, p, LORENTZIAN)


def phi_euclid(data, p):
    return _point_phi(data, p, EUCLIDEAN)


def surface_point(data, path, tol=1e-10):
    """``Re`` of the integral of the form from the base point along ``path``."""
    if not path.segments:
        return np.zeros(3)
    if abs(path.start - data.base_z) > 1e-12 * max(1.0, abs(data.base_z)):
        raise PreconditionError("path must start at the base point")
    return integrate_form(data.domain, path, data.phi, data.base_w, tol).real


def surface_points_along(data, path, tol=1e-10, w0=None, offset=None):
    """Surface values at every waypoint of ``path`` and the sheet values there.

    ``path`` may start anywhere if ``w0`` (and usually ``offset``, the surface
    value at the start) is supplied.
    """
    w0 = data.base_w if w0 is None else w0
    cum, ws = integrate_cumulative(data.domain, path, data.phi, w0, tol)
    pts = cum.real
    if offset is not None:
        pts = pts + np.asarray(offset)
    return pts, ws


def period_vector(data, cycle, w0=None, tol=1e-10):
    """Real period of the form over a closed cycle.

    Raises :class:`NotACycleError` if the path is not closed in ``z`` or the
    continued sheet does not return to ``w0``.
    """
    if not cycle.is_closed or cycle.branch_end:
        raise NotACycleError("cycle is not closed in the z-plane")
    if w0 is None:
        w0 = complex(np.sqrt(data.domain.p(cycle.start)))
    w_end = end_sheet_value(data.domain, cycle, w0)
    if abs(w_end - w0) > 1e-6 * max(1.0, abs(w0)):
        raise NotACycleError("cycle does not close on the curve (sheet changed)")
    return integrate_form(data.domain, cycle, data.phi, w0, tol).real


def pair_period(data, b1, b2, tol=1e-10):
    """Period over the loop encircling the segment between two branch points.

    Equal to twice the integral from ``b1`` to ``b2`` on one sheet; the sign
    depends on the sheet, which is irrelevant for lattice detection.
    """
    mid = 0.5 * (b1 + b2)
    w_mid = complex(np.sqrt(data.domain.p(mid)))
    to_b2 = integrate_form(data.domain, PathSpec.polyline([mid, b2], branch_end=True),
                           data.phi, w_mid, tol / 2)
    to_b1 = integrate_form(data.domain, PathSpec.polyline([mid, b1], branch_end=True),
                           data.phi, w_mid, tol / 2)
    return 2.0 * (to_b2 - to_b1).real


def dumbbell_cycle(b1, b2, radius):
    """Closed stadium contour around the segment ``[b1, b2]`` (clockwise)."""
    d = (b2 - b1) / abs(b2 - b1)
    n = 1j * d
    p1 = b1 + radius * n
    p2 = b2 + radius * n
    seg = PathSpec.polyline([p1, p2])
    seg = seg.then(PathSpec.arc(b2, p2, -np.pi, pieces=2))
    q2 = b2 - radius * n
    q1 = b1 - radius * n
    seg = seg.then(PathSpec.polyline([seg.end, q1]))
    seg = seg.then(PathSpec.arc(b1, seg.end, -np.pi, pieces=2))
    return seg


def clear_pairs(curve, clearance=0.05):
    """Pairs of finite branch points whose joining segment keeps clear of the rest.

    Ordered by the arguments of the endpoints so the first pairs are the
    adjacent ones.
    """
    pts = list(curve.branch_points)
    order = sorted(range(len(pts)), key=lambda k: (cmath.phase(pts[k]) if pts[k] != 0 else -10.0, abs(pts[k])))
    pts = [pts[k] for k in order]
    margin = clearance * curve.min_separation
    pairs = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            a, b = pts[i], pts[j]
            ok = True
            for q in pts:
                if q in (a, b):
                    continue
                d = b - a
                t = min(1.0, max(0.0, ((q - a) * d.conjugate()).real / abs(d) ** 2))
                if abs(q - (a + t * d)) < margin:
                    ok = False
                    break
            if ok:
                pairs.append((a, b))
    return pairs


def homology_periods(data, tol=1e-10):
    """Periods over loops around every clear pair of branch points."""
    return np.array([pair_period(data, a, b, tol) for a, b in clear_pairs(data.domain)])


def puncture_periods(data, radius=None, tol=1e-10):
    """Periods over small circles around every puncture of a planar domain."""
    dom = data.domain
    if radius is None:
        radius = 250 * dom.guard_radius
    out = []
    for q in dom.punctures:
        out.append(period_vector(data, PathSpec.circle(q, radius, 0.0, pieces=4), w0=1.0, tol=tol))
    return np.array(out)
