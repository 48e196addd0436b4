"""Named invariant checks grouped into suites.

Every check records the measured value, its threshold and whether it
passed; a suite passes when all of its checks do.
"""
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from . import families as fam
from .analysis import (
    BoundaryKind,
    boundary_classify,
    convergence_order,
    fold_residuals,
    mean_curvature_residual,
)
from .curves import PathSpec
from .errors import GuardError, PreconditionError
from .lattice import lattice_detect
from .lorentz import minkowski_inner
from .mesh import (
    boundary_geometry,
    causal_agreement,
    dihedral_orbit,
    generators_are_isometries,
    grid_faces,
    lattice_from_group,
    mesh_boundary_matches,
    piece_generators,
    sample_fundamental_piece,
    sample_polar,
    symmetry_group,
)
from .null_extension import (
    NullCurve,
    fold_translation,
    gamma,
    gamma_prime,
    matrix_A,
    nondegenerate_null_check,
    reextend_points,
    schwarz_h_null_curve,
    sigma,
    sigma_prime,
    timelike_extend,
    translation_c,
    xi,
    xi_hat,
    _schwarz_h_velocity,
)
from .weierstrass import homology_periods, puncture_periods, surface_points_along

SUITES = ("folds", "symmetry", "null", "extension", "periods", "zmc", "boundary", "limits")


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    relation: str = "<="
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["value"] = _clean(d["value"])
        d["threshold"] = _clean(d["threshold"])
        d["detail"] = {k: _clean(v) for k, v in d["detail"].items()}
        return d


def _clean(x):
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def at_most(name, value, threshold, **detail):
    value = float(value)
    return Check(name, value, float(threshold), bool(value <= threshold), "<=", detail)


def at_least(name, value, threshold, **detail):
    value = float(value)
    return Check(name, value, float(threshold), bool(value >= threshold), ">=", detail)


def equals(name, value, expected, **detail):
    return Check(name, float(value), float(expected), bool(value == expected), "==", detail)


# --------------------------------------------------------------------------
# folds


def unit_circle_points(data, n=360, offset=0.0):
    t = 2 * np.pi * (np.arange(n) + offset) / n
    z = np.exp(1j * t)
    return z, np.sqrt(data.domain.p(z))


def fold_scan(data, n=360, tol=1e-10, offset=None):
    """Residuals ``|Re(dg/(g^2 eta))|`` at ``n`` points of ``|z| = 1``."""
    if data.signature != "lorentz":
        raise PreconditionError("fold checks need Lorentzian data")
    if offset is None:
        offset = 0.5 if not data.domain.is_branched else 0.0
    z, w = unit_circle_points(data, n, offset)
    return np.abs(fold_residuals(data, z, w))


def suite_folds(family, parameter, tol=1e-10, **_):
    spec = fam.family_spec(family, parameter)
    r = fold_scan(spec.data, 360, tol)
    failing = int(np.sum(r > tol))
    return [
        at_most("fold-residual-unit-circle", r.max(), tol, points=360, failing_points=failing),
    ]


# --------------------------------------------------------------------------
# symmetry


def suite_symmetry(family, parameter, tol=1e-10, rng=None, **_):
    a = parameter if family in (fam.SCHWARZ_H_ZMC, fam.SCHWARZ_H_ZMC_CONJ, fam.SCHWARZ_H_R3) else 0.5
    out = []
    for name, res in fam.symmetry_residuals(a, 100, rng).items():
        out.append(at_most(f"{name}-pullback", res["pullback"], tol))
        out.append(at_most(f"{name}-maps-curve-to-curve", res["on_curve"], tol))
    if family == fam.SCHWARZ_H_ZMC:
        piece = sample_fundamental_piece(a)
        gens = piece_generators(piece)
        out.append(equals("generators-are-isometries", float(generators_are_isometries(gens)), 1.0))
        out.append(equals("depth-1-group-size", len(symmetry_group(gens, 1)), 5))
        _, info = dihedral_orbit(piece)
        out.append(equals("dihedral-orbit-size", info["order"], 6))
        out.append(at_most("dihedral-rotation-cubed-is-identity", info["closure"], 1e-8))
        out.append(at_most("dihedral-axis-is-x0", info["axis_deviation"], 1e-8))
    return out


# --------------------------------------------------------------------------
# null curve


def null_identity_residual(a, n, rng):
    s = rng.uniform(-3 * np.pi, 3 * np.pi, n)
    v = gamma_prime(s, a)
    return float(np.max(np.abs(minkowski_inner(v, v))))


def gamma_oracle(a, s):
    """First component of ``gamma(s)`` by scipy's adaptive quadrature."""
    from scipy.integrate import quad

    return quad(lambda t: float(xi(t, a)), 0.0, s, epsabs=1e-14, epsrel=1e-14, limit=200)[0]


def suite_null(family, parameter, rng=None, **_):
    a = parameter
    rng = np.random.default_rng(0) if rng is None else rng
    curve = schwarz_h_null_curve(a)
    out = [at_most("gamma-prime-lightlike", null_identity_residual(a, 1000, rng), 1e-12)]
    out.append(at_most("gamma-pi/3-vs-adaptive-oracle",
                       abs(gamma(np.pi / 3, a)[0] - gamma_oracle(a, np.pi / 3)), 1e-11))
    s = rng.uniform(-np.pi, np.pi, 50)
    out.append(equals("gamma-nondegenerate", float(np.all(nondegenerate_null_check(curve, s))), 1.0))
    line = NullCurve(lambda t: np.tile([1.0, 1.0, 0.0], (len(t), 1)), -1, 1, h=0.01,
                     acceleration=lambda t: np.zeros((len(t), 3)))
    out.append(equals("affine-null-line-degenerate",
                      float(np.any(nondegenerate_null_check(line, np.array([0.1, 0.5])))), 0.0))
    sp = sigma_prime(a, s)
    out.append(at_most("sigma-prime-lightlike", np.max(np.abs(minkowski_inner(sp, sp))), 1e-12))
    closed = 2.0 / np.sqrt(a**3 + a**-3 - 2 * np.cos(3 * s))
    out.append(at_most("xi-hat-closed-form", np.max(np.abs(xi_hat(s, a) - closed)), 1e-15))
    return out


# --------------------------------------------------------------------------
# extension


def conformality_residuals(a, n, rng):
    u = rng.uniform(0.0, np.pi / 3, n)
    v = rng.uniform(0.0, np.pi, n)
    v = np.where(v == 0.0, 0.5, v)
    fu, fv = schwarz_h_null_curve(a).extend_derivatives(u, v)
    r1 = np.abs(minkowski_inner(fu, fu) + minkowski_inner(fv, fv))
    r2 = np.abs(minkowski_inner(fu, fv))
    return float(r1.max()), float(r2.max())


def line_checks(a, n=25):
    v = np.linspace(0.05, np.pi - 0.05, n)
    p0 = timelike_extend(a, np.zeros(n), v)
    d0 = p0 - p0[0]
    e2 = np.array([0.0, 0.0, 1.0])
    col0 = float(np.max(np.linalg.norm(np.cross(d0, e2), axis=1)))
    p1 = timelike_extend(a, np.full(n, np.pi / 3), v)
    d1 = p1 - p1[0]
    norms = np.linalg.norm(d1[1:], axis=1)
    dirs = d1[1:] / norms[:, None]
    col1 = float(np.max(np.linalg.norm(np.cross(dirs, dirs[-1]), axis=1)))
    d = dirs[-1]
    return col0, col1, abs(d[0]), abs(d[1] + math.sqrt(3) * d[2])


def fold_boundary_of_hat(a, n=25, tol=1e-11):
    """``|f_hat(e^{i theta}) - sigma(pi/3 - theta)|`` with the maxface side integrated."""
    data = fam.schwarz_h_zmc(a).data
    th = np.linspace(0.0, np.pi / 3, n)
    path = PathSpec.arc(0.0, 1.0, np.pi / 3, pieces=n - 1)
    pts, _ = surface_points_along(data, path, tol)
    hat = reextend_points(a, pts)
    return float(np.max(np.linalg.norm(hat - sigma(a, np.pi / 3 - th), axis=1)))


def suite_extension(family, parameter, rng=None, **_):
    a = parameter
    rng = np.random.default_rng(0) if rng is None else rng
    A = matrix_A()
    r1, r2 = conformality_residuals(a, 200, rng)
    out = [
        at_most("conformal-fu.fu+fv.fv", r1, 1e-10),
        at_most("conformal-fu.fv", r2, 1e-10),
    ]
    u = rng.uniform(0, np.pi / 3, 200)
    v = rng.uniform(0, np.pi, 200)
    sym = np.max(np.abs(timelike_extend(a, u, np.pi + v) - timelike_extend(a, u, np.pi - v)))
    out.append(at_most("reflection-v=pi", sym, 1e-12))
    col0, col1, d0, dplane = line_checks(a)
    out.append(at_most("u=0-collinear-with-x2-axis", col0, 1e-10))
    out.append(at_most("u=pi/3-collinear", col1, 1e-10))
    out.append(at_most("u=pi/3-direction-d0", d0, 1e-10))
    out.append(at_most("u=pi/3-direction-d1+sqrt3*d2", dplane, 1e-10))
    s = rng.uniform(-np.pi, np.pi, 50)
    out.append(at_most("sigma-prime=A-gamma-prime", np.max(np.abs(sigma_prime(a, s) - gamma_prime(np.pi / 3 - s, a) @ A.T)), 1e-12))
    c1, c2 = translation_c(a)
    out.append(at_most("c-two-expressions-agree", np.max(np.abs(c1 - c2)), 1e-12))
    literal = np.max(np.linalg.norm(sigma(a, s) - (gamma(np.pi / 3 - s, a) @ A.T + c1), axis=1))
    out.append(at_most("sigma=A-gamma+c-as-printed", literal, 1e-10))
    cp = fold_translation(a)
    fixed = np.max(np.linalg.norm(sigma(a, s) - (-gamma(np.pi / 3 - s, a) @ A.T + cp), axis=1))
    out.append(at_most("sigma=-A-gamma+c'", fixed, 1e-10))
    fine = NullCurve(_schwarz_h_velocity(a)[0], -np.pi, 2 * np.pi, h=np.pi / 6000)
    c_fine = fine.extend(0.0, np.pi) - A @ fine(np.pi / 3)
    out.append(at_most("c-grid-refinement", np.max(np.abs(c_fine - c1)), 1e-11))
    out.append(at_most("f-hat-fold-boundary-equals-sigma", fold_boundary_of_hat(a), 1e-9))
    data = fam.schwarz_h_zmc(a).data
    t = np.linspace(0, np.pi / 3, 60)
    z = np.exp(1j * t)
    out.append(at_most("sigma-fold-points", np.max(np.abs(fold_residuals(data, z, np.sqrt(data.domain.p(z))))), 1e-9))
    return out


# --------------------------------------------------------------------------
# periods


EXPECTED_RANK = {
    fam.SCHWARZ_H_ZMC: 3,
    fam.SCHWARZ_H_ZMC_CONJ: 3,
    fam.RPD: 3,
    fam.SCHWARZ_H_R3: 3,
    fam.KARCHER_TOWER: 1,
    fam.KARCHER_MAXFACE: 0,
    fam.SCHERK_ZMC: 0,
}


def family_periods(spec):
    """Raw period vectors: branch-pair loops on compact curves, puncture loops otherwise."""
    if spec.data.domain.is_branched:
        return homology_periods(spec.data)
    return puncture_periods(spec.data)


def zmc_group_lattice(a, depth=6, tol=1e-6):
    piece = sample_fundamental_piece(a)
    ops = symmetry_group(piece_generators(piece), depth)
    return lattice_from_group(ops, tol=tol)


def period_report(family, parameter, tol=1e-6):
    spec = fam.family_spec(family, parameter)
    periods = family_periods(spec)
    lat = lattice_detect(periods, tol=tol)
    report = {"periods": periods, "lattice": lat}
    if family == fam.SCHWARZ_H_ZMC:
        report["group_lattice"] = zmc_group_lattice(parameter, tol=tol)
    return report


def suite_periods(family, parameter, lattice_tol=1e-6, **_):
    rep = period_report(family, parameter, lattice_tol)
    lat = rep.get("group_lattice", rep["lattice"])
    out = [equals("lattice-rank", lat.rank, EXPECTED_RANK[family]),
           at_most("lattice-fit-residual", lat.residual, lattice_tol)]
    if family == fam.SCHWARZ_H_ZMC:
        # the maxface's own periods lie in the lattice of the assembled surface
        coords, *_ = np.linalg.lstsq(lat.basis.T, rep["periods"].T, rcond=None)
        off = float(np.max(np.abs(coords - np.rint(coords)))) if coords.size else 0.0
        out.append(at_most("maxface-periods-in-group-lattice", off, lattice_tol))
    return out


# --------------------------------------------------------------------------
# ZMC (discrete mean curvature)


def _common_node_max(values, n, coarse, margin=2):
    step = n // coarse
    sub = values.reshape(n + 1, n + 1)[::step, ::step]
    return float(np.nanmax(sub[margin:-margin, margin:-margin]))


def scherk_graph_curvature(h, half=0.4, inner=0.3):
    """Max residual at grid nodes with ``|x1|, |x2| <= inner`` of the graph mesh with spacing ``h``."""
    n = int(round(2 * half / h))
    s = np.linspace(-half, half, n + 1)
    X1, X2 = np.meshgrid(s, s, indexing="ij")
    x1, x2 = X1.ravel(), X2.ravel()
    verts = np.stack([fam.scherk_graph(x1, x2), x1, x2], axis=1)
    res = mean_curvature_residual(verts, grid_faces(n + 1, n + 1)).values
    mask = (np.abs(x1) <= inner + 1e-12) & (np.abs(x2) <= inner + 1e-12)
    return float(np.nanmax(res[mask]))


def maxface_patch_curvature(a, n, coarse=8, tol=1e-11):
    """Residual at the nodes of the coarse grid on ``r in [0.2, 0.8]``, ``theta in [0.1, 0.8] pi/3``."""
    data = fam.schwarz_h_zmc(a).data
    r = np.linspace(0.2, 0.8, n + 1)
    th = np.pi / 3 * np.linspace(0.1, 0.8, n + 1)
    vals, _ = sample_polar(data, r, th, tol)
    res = mean_curvature_residual(vals.reshape(-1, 3), grid_faces(n + 1, n + 1)).values
    return _common_node_max(res, n, coarse)


def scherk_extension_residual(n=100, rng=None):
    rng = np.random.default_rng(0) if rng is None else rng
    u = rng.uniform(-0.3, 0.3, 4 * n)
    v = rng.uniform(0.01, 0.4, 4 * n)
    keep = np.flatnonzero(np.abs(u) + v < 0.7)[:n]
    pts = fam.karcher_extension_points(2, u[keep], v[keep])
    lam = fam.fit_scherk_scale(pts)
    return float(np.max(fam.scherk_residual(pts, 2.0))), lam, len(keep)


def suite_zmc(family, parameter, rng=None, **_):
    out = []
    plane = np.array([[0.3 * x + 0.1 * y, x, y] for x in np.linspace(0, 1, 9) for y in np.linspace(0, 1, 9)])
    out.append(at_most("plane-residual", np.nanmax(mean_curvature_residual(plane, grid_faces(9, 9)).values), 1e-12))
    r1, r2 = scherk_graph_curvature(0.05), scherk_graph_curvature(0.025)
    out.append(at_least("scherk-graph-order", convergence_order(0.05, r1, 0.025, r2), 1.8, coarse=r1, fine=r2))
    a = parameter if family == fam.SCHWARZ_H_ZMC else 0.5
    m1, m2 = maxface_patch_curvature(a, 16), maxface_patch_curvature(a, 32)
    out.append(at_least("maxface-patch-order", convergence_order(1 / 16, m1, 1 / 32, m2), 1.8, coarse=m1, fine=m2))
    res, lam, count = scherk_extension_residual(100, rng)
    out.append(at_most("scherk-extension-graph-residual", res, 1e-6, samples=count))
    out.append(at_most("scherk-frame-scale", abs(lam - 2.0), 1e-6, fitted=lam))
    return out


# --------------------------------------------------------------------------
# boundary


def boundary_segments(a):
    e = np.exp(1j * np.pi / 3)
    return [
        ("arg0", 0.0, 1.0, BoundaryKind.STRAIGHT_LINE),
        ("arg0-interior", 0.05, 0.95, BoundaryKind.STRAIGHT_LINE),
        ("arg-pi/3-inner", 0.0, a * e, BoundaryKind.PLANAR_CURVE),
        ("arg-pi/3-outer", a * e, e, BoundaryKind.STRAIGHT_LINE),
    ]


def suite_boundary(family, parameter, **_):
    a = parameter
    data = fam.schwarz_h_zmc(a).data
    out = []
    for name, z0, z1, want in boundary_segments(a):
        got = boundary_classify(data, z0, z1)
        out.append(equals(f"hopf-class-{name}", float(got == want), 1.0, found=got.value))
    piece = sample_fundamental_piece(a)
    for k, v in piece.weld_gaps.items():
        out.append(at_most(f"weld-gap-{k}", v, 1e-8))
    geo = boundary_geometry(piece)
    for name in ("line1", "line2"):
        out.append(at_most(f"{name}-collinearity", geo[name]["residual"], 1e-6))
    for name in ("plane", "plane_hat"):
        out.append(at_most(f"{name}-coplanarity", geo[name]["residual"], 1e-6))
        out.append(equals(f"{name}-timelike", float(geo[name]["causal"] == "timelike"), 1.0))
    ok, loops = mesh_boundary_matches(piece)
    out.append(equals("mesh-boundary-is-two-lines-two-planar-curves", float(ok), 1.0, loops=loops))
    out.append(at_least("causal-tag-agreement", causal_agreement(piece.mesh), 0.99))
    return out


# --------------------------------------------------------------------------
# limits


HELICOID_AS = (0.3, 0.2, 0.1, 0.05)
NODAL_AS = (0.9, 0.99, 0.999)


def suite_limits(family, parameter, rng=None, **_):
    out = []
    hel = [fam.helicoid_limit_deviation(a) for a in HELICOID_AS]
    out.append(at_most("helicoid-a=0.1", fam.helicoid_limit_deviation(0.1), 1.1e-3))
    out.append(at_most("helicoid-a=0.01", fam.helicoid_limit_deviation(0.01), 1e-5))
    out.append(equals("helicoid-monotone", float(all(x > y for x, y in zip(hel, hel[1:]))), 1.0,
                      deviations=hel))
    samples = fam.nodal_circle(0.5)
    nod = [fam.nodal_limit_comparison(a, samples) for a in NODAL_AS]
    out.append(equals("nodal-monotone", float(all(x > y for x, y in zip(nod, nod[1:]))), 1.0,
                      deviations=nod))
    try:
        fam.nodal_limit_comparison(0.99, [np.exp(1j * np.pi / 6)])
        guarded = 0.0
    except GuardError:
        guarded = 1.0
    out.append(equals("nodal-guard-at-node", guarded, 1.0))
    res, _, count = scherk_extension_residual(100, rng)
    out.append(at_most("scherk-graph-residual", res, 1e-6, samples=count))
    return out


RUNNERS = {
    "folds": suite_folds,
    "symmetry": suite_symmetry,
    "null": suite_null,
    "extension": suite_extension,
    "periods": suite_periods,
    "zmc": suite_zmc,
    "boundary": suite_boundary,
    "limits": suite_limits,
}


def run_suite(suite, family, parameter, seed=0, **tolerances):
    if suite not in RUNNERS:
        raise PreconditionError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    return RUNNERS[suite](family, parameter, rng=rng, **tolerances)
