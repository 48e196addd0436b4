"""Concrete surface families and the two limit regimes of the H-type family."""
from dataclasses import dataclass, field
import math

import numpy as np

from .curves import PathSpec, PlanarDomain, rpd_curve, schwarz_h_curve
from .errors import GuardError, ParameterError
from .null_extension import NullCurve, xi
from .weierstrass import EUCLIDEAN, LORENTZIAN, WeierstrassData, surface_point

SCHWARZ_H_ZMC = "schwarz-h-zmc"
SCHWARZ_H_ZMC_CONJ = "schwarz-h-zmc-conj"
RPD = "rpd"
SCHWARZ_H_R3 = "schwarz-h-r3"
KARCHER_TOWER = "karcher-tower"
KARCHER_MAXFACE = "karcher-maxface"
SCHERK_ZMC = "scherk-zmc"

FAMILIES = (SCHWARZ_H_ZMC, SCHWARZ_H_ZMC_CONJ, RPD, SCHWARZ_H_R3,
            KARCHER_TOWER, KARCHER_MAXFACE, SCHERK_ZMC)

#: Nodes of the a -> 1 limit in the coordinate zeta with zeta^2 = z.
NODES_ZETA = np.array([np.exp(1j * np.pi / 6), np.exp(-1j * np.pi / 6),
                       -np.exp(1j * np.pi / 6), -np.exp(-1j * np.pi / 6), 1j, -1j])


@dataclass(frozen=True)
class FamilySpec:
    """A family member: its tag, parameter, Weierstrass data and domain."""

    family: str
    parameter: float
    data: WeierstrassData
    domain: str
    extras: dict = field(default_factory=dict)

    @property
    def signature(self):
        return self.data.signature

    @property
    def curve(self):
        return self.data.domain


def _g_z(z, w):
    return z


def _dg_one(z, w):
    return np.ones_like(z)


def _check_unit_interval(a, name):
    if not 0.0 < a < 1.0:
        raise ParameterError(f"{name} needs a in (0, 1), got {a}")


def _h_base(a):
    return 1.0 + 0j, complex(math.sqrt(2.0 + a**3 + a**-3))


def schwarz_h_zmc(a, allow_maxface=False):
    """Lorentzian data ``g = z``, ``eta = i dz / w`` on ``w^2 = z(z^3+a^3)(z^3+a^-3)``.

    The assembled ZMC surface needs ``0 < a < 1``; with ``allow_maxface`` the
    maxface alone is built for any ``a > 0`` other than ``1``.
    """
    if not allow_maxface:
        _check_unit_interval(a, SCHWARZ_H_ZMC)
    curve = schwarz_h_curve(a)
    z0, w0 = _h_base(a)
    data = WeierstrassData(SCHWARZ_H_ZMC, LORENTZIAN, _g_z, _dg_one,
                           lambda z, w: 1j / w, curve, z0, w0)
    return FamilySpec(SCHWARZ_H_ZMC, a, data, "sector |z|<=1, 0<=arg z<=pi/3")


def schwarz_h_zmc_conjugate(a, allow_maxface=False):
    """Same curve with ``eta = dz / w``; its singularities are conelike."""
    if not allow_maxface:
        _check_unit_interval(a, SCHWARZ_H_ZMC_CONJ)
    curve = schwarz_h_curve(a)
    z0, w0 = _h_base(a)
    data = WeierstrassData(SCHWARZ_H_ZMC_CONJ, LORENTZIAN, _g_z, _dg_one,
                           lambda z, w: 1.0 / w, curve, z0, w0)
    return FamilySpec(SCHWARZ_H_ZMC_CONJ, a, data, "sector |z|<=1, 0<=arg z<=pi/3")


def rpd(a):
    """Euclidean rPD surface, ``w^2 = z(z^3-a^3)(z^3+a^-3)``, ``g = z``, ``eta = dz/w``."""
    curve = rpd_curve(a)
    z0 = complex(np.exp(1j * np.pi / 6))
    w0 = complex(np.sqrt(curve.p(z0)))
    data = WeierstrassData(RPD, EUCLIDEAN, _g_z, _dg_one, lambda z, w: 1.0 / w, curve, z0, w0)
    return FamilySpec(RPD, a, data, "compact genus-3 curve")


def schwarz_h_r3(a):
    """Euclidean Schwarz H surface on the same curve as :func:`schwarz_h_zmc`."""
    _check_unit_interval(a, SCHWARZ_H_R3)
    curve = schwarz_h_curve(a)
    z0, w0 = _h_base(a)
    data = WeierstrassData(SCHWARZ_H_R3, EUCLIDEAN, _g_z, _dg_one, lambda z, w: 1.0 / w, curve, z0, w0)
    return FamilySpec(SCHWARZ_H_R3, a, data, "compact genus-3 curve")


def _check_k(k):
    if int(k) != k or k < 2:
        raise ParameterError(f"k must be an integer >= 2, got {k}")
    return int(k)


def _karcher_domain(k, family):
    punctures = np.exp(1j * np.pi * (2 * np.arange(2 * k) + 1) / (2 * k))
    return PlanarDomain(family, punctures, parameter=k)


def _karcher_data(k, family, signature, factor):
    dom = _karcher_domain(k, family)

    def g(z, w):
        return z ** (k - 1)

    def dg(z, w):
        return (k - 1) * z ** (k - 2)

    def eta(z, w):
        return factor / (z ** (2 * k) + 1)

    return WeierstrassData(family, signature, g, dg, eta, dom, 0j, 1.0 + 0j)


def karcher_tower(k):
    """Euclidean Karcher tower ``g = z^(k-1)``, ``eta = dz / (z^(2k) + 1)``."""
    k = _check_k(k)
    data = _karcher_data(k, KARCHER_TOWER, EUCLIDEAN, 1.0)
    return FamilySpec(KARCHER_TOWER, k, data, f"sphere minus the {2 * k} roots of z^{2 * k} = -1")


def karcher_maxface(k):
    """Lorentzian ``g = z^(k-1)``, ``eta = i dz / (z^(2k) + 1)``; singular set ``|z| = 1``."""
    k = _check_k(k)
    data = _karcher_data(k, KARCHER_MAXFACE, LORENTZIAN, 1j)
    return FamilySpec(KARCHER_MAXFACE, k, data, f"sphere minus the {2 * k} roots of z^{2 * k} = -1")


def scherk_zmc():
    """The ``k = 2`` Karcher-type maxface whose extension is the Scherk-type graph."""
    spec = karcher_maxface(2)
    return FamilySpec(SCHERK_ZMC, 2, spec.data, "graph x0 = log(cosh x1 / cosh x2)",
                      {"frame": scherk_frame().tolist(), "scale": 2.0})


def family_spec(family, parameter):
    """Dispatch on the CLI identifier."""
    if family == SCHWARZ_H_ZMC:
        return schwarz_h_zmc(parameter)
    if family == SCHWARZ_H_ZMC_CONJ:
        return schwarz_h_zmc_conjugate(parameter)
    if family == RPD:
        return rpd(parameter)
    if family == SCHWARZ_H_R3:
        return schwarz_h_r3(parameter)
    if family == KARCHER_TOWER:
        return karcher_tower(parameter)
    if family == KARCHER_MAXFACE:
        return karcher_maxface(parameter)
    if family == SCHERK_ZMC:
        return scherk_zmc()
    raise ParameterError(f"unknown family {family!r}")


# --------------------------------------------------------------------------
# Scherk-type graph and the k = 2 extension


def _logcosh(x):
    x = np.abs(np.asarray(x, dtype=float))
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def scherk_graph(x1, x2):
    """Height ``log(cosh x1 / cosh x2)``, stable for large arguments."""
    out = _logcosh(x1) - _logcosh(x2)
    return float(out) if np.ndim(out) == 0 else out


def scherk_frame():
    """Linear map taking the k = 2 Karcher-type maxface onto the graph frame (up to scale)."""
    r = 1.0 / math.sqrt(2.0)
    return np.array([[1.0, 0.0, 0.0], [0.0, r, r], [0.0, r, -r]])


def karcher_null_curve(k, margin=0.02, h=None):
    """Image of the fold ``|z| = 1`` near ``z = 1``, with base ``z = 1``.

    The velocity is ``Re(Phi(e^{it}) i e^{it})``; the table covers
    ``|t| <= pi/(2k) - margin`` (the punctures sit at ``t = +-pi/(2k)``).
    """
    k = _check_k(k)
    data = karcher_maxface(k).data
    half = math.pi / (2 * k) - margin
    if half <= 0:
        raise ParameterError("margin too large")

    def velocity(t):
        z = np.exp(1j * np.asarray(t, dtype=float))
        return (data.phi(z, np.ones_like(z)) * (1j * z)[:, None]).real

    return NullCurve(velocity, -half, half, h=h or half / 1500, label=f"karcher k={k}")


def karcher_fold_offset(k, tol=1e-12):
    """``f(1)`` for the Karcher-type maxface based at ``z = 0``."""
    data = karcher_maxface(k).data
    return surface_point(data, PathSpec.polyline([0.0, 1.0]), tol)


def karcher_extension_points(k, u, v, margin=0.02):
    """Timelike extension of the Karcher-type maxface across its fold near ``z = 1``."""
    curve = karcher_null_curve(k, margin)
    return curve.extend(u, v) + karcher_fold_offset(k)


def fit_scherk_scale(points):
    """Least-squares scale ``lam`` with ``lam * frame @ p`` on the Scherk graph."""
    from scipy.optimize import minimize_scalar

    q = np.asarray(points, dtype=float) @ scherk_frame().T

    def cost(lam):
        y = lam * q
        return float(np.sum((y[:, 0] - scherk_graph(y[:, 1], y[:, 2])) ** 2))

    res = minimize_scalar(cost, bounds=(0.1, 10.0), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.x)


def scherk_residual(points, scale=2.0):
    """``|x0 - log(cosh x1 / cosh x2)|`` after mapping ``points`` to the graph frame."""
    y = scale * np.asarray(points, dtype=float) @ scherk_frame().T
    return np.abs(y[:, 0] - scherk_graph(y[:, 1], y[:, 2]))


# --------------------------------------------------------------------------
# Limits


def helicoid_limit_deviation(a, n=20001):
    """``sup |sqrt(a^3 + a^-3) xi(t) - 2|`` over ``t in [0, 2 pi / 3]``."""
    t = np.concatenate([np.linspace(0.0, 2 * np.pi / 3, n), [np.pi / 3]])
    return float(np.max(np.abs(math.sqrt(a**3 + a**-3) * xi(t, a) - 2.0)))


def _nodal_guard(zeta, guard):
    zeta = np.asarray(zeta, dtype=complex)
    d = np.abs(zeta[:, None] - NODES_ZETA[None, :]).min(axis=1)
    if np.any(d < guard):
        raise GuardError(f"sample within {guard} of a node (closest {d.min():.3e})")
    if np.any(np.abs(zeta) > 1.0 + 1e-12):
        raise GuardError("samples must lie in |zeta| <= 1")
    if np.any(np.abs(zeta) < 1e-9):
        raise GuardError("zeta = 0 is a branch point of z = zeta^2")


def _h_value_at_zeta(data, zeta, tol):
    """``f_a(zeta^2)`` along the image of the zeta-path ``1 -> |zeta| -> zeta``."""
    r = abs(zeta)
    theta = math.atan2(zeta.imag, zeta.real)
    path = PathSpec.polyline([1.0, r * r]) if abs(r - 1.0) > 1e-14 else PathSpec()
    if abs(theta) > 1e-14:
        arc = PathSpec.arc(0.0, r * r, 2 * theta, pieces=max(1, int(abs(theta) / 0.5) + 1))
        path = path.then(arc) if path.segments else arc
    return surface_point(data, path, tol)


def nodal_limit_comparison(a, zeta, sign=1, guard=0.05, tol=1e-11):
    """Distance between ``f_a(zeta^2)`` and ``2 sign f_K(zeta)`` (Karcher-type, k = 3).

    Both sides are normalised by their value at the first sample, so only
    the shapes are compared.  Returns the maximum Euclidean deviation.
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    _nodal_guard(zeta, guard)
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    h = schwarz_h_zmc(a, allow_maxface=True).data
    k3 = karcher_maxface(3).data
    fa = np.array([_h_value_at_zeta(h, complex(q), tol) for q in zeta])
    fk = np.array([surface_point(k3, PathSpec.polyline([0.0, complex(q)]), tol) for q in zeta])
    lim = 2.0 * sign * fk
    dev = (fa - fa[0]) - (lim - lim[0])
    return float(np.max(np.linalg.norm(dev, axis=1)))


def nodal_circle(radius=0.5, n=24, phase=0.1):
    """Samples on ``|zeta| = radius`` shifted off the real axis."""
    return radius * np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n))


# --------------------------------------------------------------------------
# Anti-holomorphic symmetries of the H-type curve


@dataclass(frozen=True)
class CurveSymmetry:
    """An anti-holomorphic map ``(z, w) -> (z', w')`` with ``psi^* Phi = M conj(Phi)``.

    ``dzbar`` is the derivative of ``z'`` with respect to ``conj(z)``.
    """

    name: str
    apply: object
    dzbar: object
    matrix: np.ndarray


def psi_symmetries():
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    w3 = np.exp(2j * np.pi / 3)
    w6 = np.exp(1j * np.pi / 3)
    return [
        CurveSymmetry("psi1", lambda z, w: (np.conj(z), np.conj(w)),
                      lambda z: np.ones_like(z), np.diag([-1.0, -1.0, 1.0])),
        CurveSymmetry("psi2", lambda z, w: (w3 * np.conj(z), w6 * np.conj(w)),
                      lambda z: np.full_like(z, w3),
                      np.array([[1.0, 0.0, 0.0], [0.0, -c, s], [0.0, s, c]])),
        CurveSymmetry("psi3", lambda z, w: (1.0 / np.conj(z), np.conj(w) / np.conj(z) ** 4),
                      lambda z: -1.0 / np.conj(z) ** 2, np.eye(3)),
    ]


def random_curve_points(curve, n, rng, r_min=0.4, r_max=2.5, clearance=0.05):
    """Random points ``(z, w)`` away from the branch points, random sheet."""
    zs = []
    bps = np.asarray(curve.branch_points)
    while len(zs) < n:
        z = rng.uniform(r_min, r_max) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        if np.min(np.abs(bps - z)) > clearance:
            zs.append(z)
    z = np.array(zs)
    w = np.sqrt(curve.p(z)) * rng.choice([-1.0, 1.0], size=n)
    return z, w


def symmetry_residuals(a, n=100, rng=None):
    """Max of ``|Phi(psi p) dpsi - M conj(Phi(p))|`` and of the on-curve error, per map."""
    rng = np.random.default_rng(0) if rng is None else rng
    data = schwarz_h_zmc(a, allow_maxface=True).data
    z, w = random_curve_points(data.domain, n, rng)
    out = {}
    for sym in psi_symmetries():
        zz, ww = sym.apply(z, w)
        lhs = data.phi(zz, ww) * sym.dzbar(z)[:, None]
        rhs = np.conj(data.phi(z, w)) @ sym.matrix.T
        on_curve = np.abs(ww * ww - data.domain.p(zz)) / np.maximum(1.0, np.abs(ww) ** 2)
        out[sym.name] = {"pullback": float(np.max(np.abs(lhs - rhs))), "on_curve": float(on_curve.max())}
    return out


def psi3_as_printed_on_curve(a, n=100, rng=None):
    """On-curve error of ``(1/conj z, conj w / conj z)``; large, so that map is not a curve map."""
    rng = np.random.default_rng(0) if rng is None else rng
    curve = schwarz_h_curve(a)
    z, w = random_curve_points(curve, n, rng)
    zz, ww = 1.0 / np.conj(z), np.conj(w) / np.conj(z)
    return float(np.max(np.abs(ww * ww - curve.p(zz)) / np.maximum(1.0, np.abs(ww) ** 2)))
