"""Hyperelliptic curves ``w^2 = p(z)``, sheet tracking and contour integrals.

The square root ``w`` is continued along a contour by always taking the
root of ``p(z)`` nearest to the previous sample, refining the sampling until
consecutive samples differ by less than half their modulus.  Contours may
end at a branch point; that last segment is integrated in the variable
``tau`` with ``s = 1 - tau**2``, which removes the inverse square-root
singularity of ``dz / w``.
"""
from dataclasses import dataclass, field
import cmath
import math

import numpy as np

from .errors import (
    ContinuationError,
    DegenerateCurveError,
    ParameterError,
    PreconditionError,
)
from .quadrature import adaptive_gk

SHEET_TOL = 1e-10


@dataclass(frozen=True)
class SheetPoint:
    z: complex
    w: complex


class HyperellipticCurve:
    """The curve ``w^2 = leading * prod(z - r)`` over its finite roots.

    Parameters
    ----------
    family : str
        Tag such as ``"schwarz-h"`` or ``"rpd"``.
    roots : sequence of complex
        Finite roots of ``p``; they must be pairwise distinct.
    parameter : float, optional
        The family parameter, kept for reporting.
    """

    is_branched = True

    def __init__(self, family, roots, leading=1.0, parameter=None):
        self.family = family
        self.parameter = parameter
        self.leading = complex(leading)
        self.roots = np.asarray(roots, dtype=complex)
        diffs = np.abs(self.roots[:, None] - self.roots[None, :])
        diffs[np.diag_indices(len(self.roots))] = np.inf
        self.min_separation = float(diffs.min())
        scale = max(1.0, float(np.max(np.abs(self.roots))))
        if self.min_separation <= 1e-12 * scale:
            raise DegenerateCurveError(
                f"{family} curve has a repeated root (parameter={parameter})"
            )
        self.guard_radius = 1e-3 * self.min_separation

    @property
    def branch_points(self):
        return list(self.roots)

    @property
    def singular_points(self):
        return self.roots

    @property
    def branched_at_infinity(self):
        return len(self.roots) % 2 == 1

    def p(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.leading, dtype=complex)
        for r in self.roots:
            out = out * (z - r)
        return out

    def dp_at_root(self, k):
        """``p'`` at the ``k``-th root, from the factored form."""
        r = self.roots[k]
        others = np.delete(self.roots, k)
        return complex(self.leading * np.prod(r - others))

    def root_index(self, z, tol=1e-12):
        d = np.abs(self.roots - z)
        k = int(np.argmin(d))
        return k if d[k] <= tol * max(1.0, abs(z)) else None

    def on_curve(self, z, w, tol=SHEET_TOL):
        pz = complex(self.p(z))
        return abs(w * w - pz) <= tol * (1.0 + abs(pz))

    def __repr__(self):
        return f"HyperellipticCurve({self.family!r}, parameter={self.parameter!r})"


class PlanarDomain:
    """A punctured plane; used where the Weierstrass data needs no square root."""

    is_branched = False

    def __init__(self, family, punctures, parameter=None):
        self.family = family
        self.parameter = parameter
        self.punctures = np.asarray(punctures, dtype=complex)
        diffs = np.abs(self.punctures[:, None] - self.punctures[None, :])
        diffs[np.diag_indices(len(self.punctures))] = np.inf
        self.guard_radius = 1e-3 * float(diffs.min())

    @property
    def singular_points(self):
        return self.punctures

    branch_points = property(lambda self: [])

    def p(self, z):
        return np.ones(np.shape(z), dtype=complex)

    def on_curve(self, z, w, tol=SHEET_TOL):
        return abs(w - 1.0) <= tol

    def __repr__(self):
        return f"PlanarDomain({self.family!r}, parameter={self.parameter!r})"


def schwarz_h_curve(a):
    """``w^2 = z (z^3 + a^3)(z^3 + a^-3)``; degenerate at ``a = 1``."""
    if not a > 0:
        raise ParameterError(f"a must be positive, got {a}")
    if abs(a - 1.0) < 1e-12:
        raise DegenerateCurveError("w^2 = z(z^3+1)^2 has double roots at a = 1")
    cube = np.exp(1j * np.pi / 3) * np.exp(2j * np.pi * np.arange(3) / 3)
    roots = [0.0] + list(a * cube) + list(cube / a)
    return HyperellipticCurve("schwarz-h", roots, parameter=a)


def rpd_curve(a):
    """``w^2 = z (z^3 - a^3)(z^3 + a^-3)``."""
    if not a > 0:
        raise ParameterError(f"a must be positive, got {a}")
    unity = np.exp(2j * np.pi * np.arange(3) / 3)
    roots = [0.0] + list(a * unity) + list(-unity / a)
    return HyperellipticCurve("rpd", roots, parameter=a)


def branch_points(curve):
    return list(curve.branch_points)


# --------------------------------------------------------------------------
# Paths


@dataclass(frozen=True)
class Segment:
    """A straight segment or circular arc parametrised over ``s in [0, 1]``."""

    start: complex
    end: complex
    center: complex = None
    sweep: float = 0.0
    refine: int = 1

    @classmethod
    def arc(cls, center, start, sweep, refine=1):
        end = center + (start - center) * cmath.exp(1j * sweep)
        return cls(complex(start), complex(end), complex(center), float(sweep), refine)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        if self.center is None:
            return self.start + (self.end - self.start) * s
        return self.center + (self.start - self.center) * np.exp(1j * self.sweep * s)

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        if self.center is None:
            return np.full(s.shape, self.end - self.start, dtype=complex)
        return 1j * self.sweep * (self.point(s) - self.center)

    def end_offset(self, tau):
        """``(z(1 - tau^2) - end) / tau^2``, accurate as ``tau -> 0``."""
        tau = np.asarray(tau, dtype=float)
        if self.center is None:
            return np.full(tau.shape, self.start - self.end, dtype=complex)
        t2 = tau * tau
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (self.end - self.center) * np.expm1(-1j * self.sweep * t2) / t2
        return np.where(t2 == 0.0, -1j * self.sweep * (self.end - self.center), q)

    def reversed(self):
        if self.center is None:
            return Segment(self.end, self.start, None, 0.0, self.refine)
        return Segment(self.end, self.start, self.center, -self.sweep, self.refine)

    def distance_to(self, q):
        if self.center is None:
            d = self.end - self.start
            L2 = abs(d) ** 2
            if L2 == 0.0:
                return abs(q - self.start)
            t = min(1.0, max(0.0, ((q - self.start) * d.conjugate()).real / L2))
            return abs(q - (self.start + t * d))
        pts = self.point(np.linspace(0.0, 1.0, 4097))
        return float(np.min(np.abs(pts - q)))


@dataclass(frozen=True)
class PathSpec:
    """An oriented chain of segments.

    ``branch_end`` declares that the final waypoint is a branch point of the
    curve; no other waypoint may be one.
    """

    segments: tuple = field(default_factory=tuple)
    branch_end: bool = False

    @classmethod
    def polyline(cls, points, branch_end=False, refine=1):
        pts = [complex(p) for p in points]
        segs = tuple(Segment(p, q, refine=refine) for p, q in zip(pts[:-1], pts[1:]))
        for sg in segs:
            if sg.start == sg.end:
                raise PreconditionError("consecutive waypoints must be distinct")
        return cls(segs, branch_end)

    @classmethod
    def arc(cls, center, start, sweep, branch_end=False, pieces=1):
        segs = []
        z = complex(start)
        for _ in range(pieces):
            sg = Segment.arc(center, z, sweep / pieces)
            segs.append(sg)
            z = sg.end
        return cls(tuple(segs), branch_end)

    @classmethod
    def circle(cls, center, radius, start_angle=0.0, turns=1, pieces=8):
        start = center + radius * cmath.exp(1j * start_angle)
        return cls.arc(center, start, 2 * math.pi * turns, pieces=pieces * abs(turns))

    @property
    def waypoints(self):
        if not self.segments:
            return []
        return [self.segments[0].start] + [sg.end for sg in self.segments]

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    @property
    def is_closed(self):
        return bool(self.segments) and abs(self.start - self.end) <= 1e-12 * max(1.0, abs(self.start))

    def then(self, other):
        if self.branch_end:
            raise PreconditionError("cannot continue a path through a branch point")
        if self.segments and other.segments and abs(self.end - other.start) > 1e-12:
            raise PreconditionError("paths do not join")
        return PathSpec(self.segments + other.segments, other.branch_end)

    def reversed(self):
        if self.branch_end:
            raise PreconditionError("reverse of a branch-ended path starts at a branch point")
        return PathSpec(tuple(sg.reversed() for sg in reversed(self.segments)))


# --------------------------------------------------------------------------
# Sheet tracking


def _choose_signs(roots, v0):
    """Signs making ``roots`` a continuous sequence starting nearest ``v0``."""
    first = 1.0 if abs(roots[0] - v0) <= abs(roots[0] + v0) else -1.0
    same = np.abs(roots[1:] - roots[:-1]) <= np.abs(roots[1:] + roots[:-1])
    flips = np.where(same, 1.0, -1.0)
    return roots * (first * np.concatenate([[1.0], np.cumprod(flips)]))


def _track(square, t0, t1, v0, n0=16, max_samples=200_000):
    """Continue ``v`` with ``v**2 = square(t)`` from ``v(t0) = v0`` to ``t1``."""
    t = np.linspace(t0, t1, n0 + 1)
    while True:
        v = _choose_signs(np.sqrt(square(t)), v0)
        mod = np.abs(v)
        bad = np.abs(np.diff(v)) >= 0.5 * np.minimum(mod[1:], mod[:-1])
        if not bad.any():
            return t, v
        if len(t) > max_samples:
            raise ContinuationError("sheet tracking failed to resolve the square root")
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        t = np.sort(np.concatenate([t, mids]))
        if t1 < t0:
            t = t[::-1]


class _SegmentSheet:
    """Continued square root along one segment, evaluable anywhere on it."""

    def __init__(self, curve, seg, w_start, branch_end=False):
        self.curve = curve
        self.seg = seg
        self.branch_end = branch_end
        if not curve.is_branched:
            self.w_end = 1.0 + 0j
            return
        if branch_end:
            k = curve.root_index(seg.end, tol=1e-9)
            if k is None:
                raise PreconditionError("declared branch endpoint is not a root of p")
            others = np.delete(curve.roots, k)

            def square(tau):
                tau = np.asarray(tau, dtype=float)
                q = seg.end_offset(tau)
                z = seg.end + tau * tau * q
                out = curve.leading * q
                for r in others:
                    out = out * (z - r)
                return out

            self._square = square
            self.t, self.v = _track(square, 1.0, 0.0, w_start)
            self.t, self.v = self.t[::-1], self.v[::-1]
            self.w_end = 0j
        else:
            self._square = lambda s: curve.p(seg.point(s))
            self.t, self.v = _track(self._square, 0.0, 1.0, w_start)
            self.w_end = complex(self.v[-1])

    def value(self, t):
        """``w`` at ``s = t`` (regular) or ``u = w / tau`` at ``tau = t`` (branch end)."""
        t = np.asarray(t, dtype=float)
        if not self.curve.is_branched:
            return np.ones(t.shape, dtype=complex)
        guess = np.interp(t, self.t, self.v.real) + 1j * np.interp(t, self.t, self.v.imag)
        r = np.sqrt(self._square(t))
        return np.where(np.abs(r - guess) <= np.abs(r + guess), r, -r)

    def samples(self):
        if not self.curve.is_branched:
            s = np.linspace(0.0, 1.0, 17)
            return s, np.ones(s.shape, dtype=complex)
        if self.branch_end:
            return 1.0 - self.t**2, self.t * self.v
        return self.t, self.v


def _check_guard(curve, path):
    pts = curve.singular_points
    if len(pts) == 0:
        return
    r = curve.guard_radius
    for idx, seg in enumerate(path.segments):
        last = idx == len(path.segments) - 1
        for q in pts:
            if last and path.branch_end and abs(q - seg.end) <= 1e-9 * max(1.0, abs(q)):
                continue
            if seg.distance_to(q) < r:
                raise ContinuationError(
                    f"path passes within {r:.2e} of singular point {q:.6g}"
                )


def _sheets(curve, path, w0):
    if not path.segments:
        return []
    _check_guard(curve, path)
    if curve.is_branched:
        if not curve.on_curve(path.start, w0):
            raise PreconditionError(f"w0={w0} is not a square root of p({path.start})")
        if abs(w0) == 0.0:
            raise PreconditionError("paths must start at a regular point")
    sheets = []
    w = complex(w0)
    n = len(path.segments)
    for i, seg in enumerate(path.segments):
        sh = _SegmentSheet(curve, seg, w, branch_end=path.branch_end and i == n - 1)
        sheets.append(sh)
        w = sh.w_end
    return sheets


def continue_sheet(curve, path, w0):
    """Sheet points along a refined sampling of ``path``, starting from ``w0``."""
    out = []
    for i, sh in enumerate(_sheets(curve, path, w0)):
        s, w = sh.samples()
        z = sh.seg.point(s)
        start = 0 if i == 0 else 1
        out.extend(SheetPoint(complex(zz), complex(ww)) for zz, ww in zip(z[start:], w[start:]))
    return out


def end_sheet_value(curve, path, w0):
    """The continued ``w`` at the end of ``path``."""
    sheets = _sheets(curve, path, w0)
    return complex(sheets[-1].w_end) if sheets else complex(w0)


def _segment_integrand(form, sh):
    seg = sh.seg
    if sh.branch_end:
        def integrand(tau):
            s = 1.0 - tau * tau
            z = seg.end + tau * tau * seg.end_offset(tau)
            w = tau * sh.value(tau)
            return form(z, w) * (seg.deriv(s) * 2.0 * tau)[:, None]
    else:
        def integrand(s):
            return form(seg.point(s), sh.value(s)) * seg.deriv(s)[:, None]
    return integrand


def integrate_segments(curve, path, form, w0, tol=1e-10):
    """Per-segment integrals of ``form(z, w) dz`` and the sheet value at each waypoint.

    Returns ``(values, ws)`` where ``values`` has shape ``(n_segments, 3)`` and
    ``ws`` holds ``w`` at every waypoint (``0`` at a branch end).
    """
    sheets = _sheets(curve, path, w0)
    vals = []
    ws = [complex(w0)]
    seg_tol = tol / max(1, len(sheets))
    for sh in sheets:
        v, _ = adaptive_gk(_segment_integrand(form, sh), 0.0, 1.0, tol=seg_tol,
                           initial=max(1, sh.seg.refine))
        vals.append(v)
        ws.append(complex(sh.w_end))
    return np.array(vals, dtype=complex).reshape(-1, 3), ws


def integrate_form(curve, path, form, w0, tol=1e-10):
    """Contour integral of the 1-form ``form(z, w) dz`` along ``path``.

    ``form`` maps arrays ``z, w`` of shape ``(n,)`` to coefficients of shape
    ``(n, 3)``.  A zero-length path integrates to zero.
    """
    if not path.segments:
        return np.zeros(3, dtype=complex)
    vals, _ = integrate_segments(curve, path, form, w0, tol)
    return vals.sum(axis=0)


def integrate_cumulative(curve, path, form, w0, tol=1e-10):
    """Running integrals at each waypoint (first entry is zero) and the sheet values there."""
    vals, ws = integrate_segments(curve, path, form, w0, tol)
    cum = np.vstack([np.zeros((1, 3), dtype=complex), np.cumsum(vals, axis=0)])
    return cum, ws
