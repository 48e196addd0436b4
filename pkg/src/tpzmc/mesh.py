"""Fundamental pieces, symmetry groups, assembly and mesh diagnostics."""
from collections import deque
from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .curves import PathSpec
from .errors import GlueError, PreconditionError
from .lattice import lattice_detect
from .lorentz import (
    CausalClass,
    ETA,
    LORENTZ_DIAG,
    line_rotation,
    plane_causal_class,
    plane_reflection,
    preserves_minkowski,
)
from .null_extension import reextend_points, schwarz_h_null_curve
from .weierstrass import surface_points_along

PATCH_MAX, PATCH_MIN, PATCH_MAXHAT = 0, 1, 2
PATCH_NAMES = {PATCH_MAX: "max", PATCH_MIN: "min", PATCH_MAXHAT: "maxhat"}
CAUSAL_NAMES = {c.code: c.value for c in CausalClass}

WELD_TOL = 1e-7
GUARD_BAND = 0.02


@dataclass
class TaggedMesh:
    vertices: np.ndarray
    faces: np.ndarray
    causal: np.ndarray
    patch: np.ndarray
    copy: np.ndarray
    residual: np.ndarray = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        m = len(self.faces)
        self.causal = np.broadcast_to(np.asarray(self.causal, dtype=np.int8), (m,)).copy()
        self.patch = np.broadcast_to(np.asarray(self.patch, dtype=np.int8), (m,)).copy()
        self.copy = np.broadcast_to(np.asarray(self.copy, dtype=np.int32), (m,)).copy()
        if m and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise PreconditionError("face index out of range")

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), [], [], [])

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    def face_areas(self):
        v = self.vertices[self.faces]
        return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)


def concat_meshes(meshes):
    meshes = [m for m in meshes if m.n_faces or m.n_vertices]
    if not meshes:
        return TaggedMesh.empty()
    offsets = np.cumsum([0] + [m.n_vertices for m in meshes[:-1]])
    return TaggedMesh(
        np.vstack([m.vertices for m in meshes]),
        np.vstack([m.faces + o for m, o in zip(meshes, offsets)]),
        np.concatenate([m.causal for m in meshes]),
        np.concatenate([m.patch for m in meshes]),
        np.concatenate([m.copy for m in meshes]),
    )


def grid_faces(n0, n1):
    """Type-1 triangulation of an ``n0 x n1`` vertex grid (row-major indices)."""
    idx = np.arange(n0 * n1).reshape(n0, n1)
    a = idx[:-1, :-1].ravel()
    b = idx[1:, :-1].ravel()
    c = idx[:-1, 1:].ravel()
    d = idx[1:, 1:].ravel()
    return np.concatenate([np.stack([a, b, d], axis=1), np.stack([a, d, c], axis=1)])


def polar_faces(n_radial, n_angular):
    """Faces of a polar grid whose first ring (``r = 0``) is a single apex vertex.

    Vertex 0 is the apex; ring ``i >= 1`` holds ``n_angular + 1`` vertices.
    """
    m = n_angular + 1
    fan = np.stack([np.zeros(n_angular, dtype=np.int64), 1 + np.arange(n_angular), 2 + np.arange(n_angular)], axis=1)
    rest = grid_faces(n_radial, m) + 1
    return np.vstack([fan, rest])


def weld(mesh, tol=WELD_TOL):
    """Merge vertices closer than ``tol``; drop collapsed and duplicate faces."""
    if mesh.n_vertices == 0:
        return mesh, np.zeros(0, dtype=np.int64)
    pairs = cKDTree(mesh.vertices).query_pairs(tol, output_type="ndarray")
    n = mesh.n_vertices
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    # representative: first vertex of each component, keeping original order
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    new_index = np.empty(len(first), dtype=np.int64)
    new_index[order] = np.arange(len(first))
    remap = new_index[labels]
    verts = mesh.vertices[first[order]]
    faces = remap[mesh.faces]
    ok = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    key = np.sort(faces, axis=1)
    _, keep = np.unique(key, axis=0, return_index=True)
    mask = np.zeros(len(faces), dtype=bool)
    mask[keep] = True
    mask &= ok
    out = TaggedMesh(verts, faces[mask], mesh.causal[mask], mesh.patch[mask], mesh.copy[mask])
    return out, remap


def boundary_edges(faces):
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    key = np.sort(e, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    return uniq[counts == 1]


def orient_consistently(faces):
    """Flip faces so neighbours traverse shared edges oppositely.

    Returns the new faces and the number of edges where that was impossible
    (zero for an orientable surface).
    """
    faces = np.array(faces, dtype=np.int64)
    m = len(faces)
    edge_faces = {}
    for fi, (a, b, c) in enumerate(faces):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_faces.setdefault((min(u, v), max(u, v)), []).append(fi)
    flip = np.full(m, -1, dtype=np.int8)
    conflicts = 0

    def directed(fi, u, v):
        a, b, c = faces[fi]
        fwd = (a, b) == (u, v) or (b, c) == (u, v) or (c, a) == (u, v)
        return fwd != bool(flip[fi])

    for seed in range(m):
        if flip[seed] >= 0:
            continue
        flip[seed] = 0
        queue = deque([seed])
        while queue:
            fi = queue.popleft()
            a, b, c = faces[fi]
            for u, v in ((a, b), (b, c), (c, a)):
                nbrs = edge_faces[(min(u, v), max(u, v))]
                if len(nbrs) != 2:
                    continue
                other = nbrs[0] if nbrs[1] == fi else nbrs[1]
                want_same = not directed(fi, u, v)
                if flip[other] < 0:
                    flip[other] = 0
                    if directed(other, u, v) != want_same:
                        flip[other] = 1
                    queue.append(other)
                elif directed(other, u, v) != want_same:
                    conflicts += 1
    out = faces.copy()
    out[flip == 1] = out[flip == 1][:, ::-1]
    return out, conflicts // 2


# --------------------------------------------------------------------------
# Polar sampling of a sector of the z-plane


def _branch_radii_on_ray(curve, theta, r_max):
    out = []
    for b in getattr(curve, "branch_points", []):
        r = abs(b)
        if 0 < r <= r_max * (1 + 1e-12) and abs(np.angle(b * np.exp(-1j * theta))) < 1e-9:
            out.append(r)
    return sorted(out, reverse=True)


def sample_polar(data, radii, thetas, tol=1e-10):
    """Surface values on the polar grid ``radii x thetas``.

    ``radii`` ascend and may start at ``0`` (the apex, a single point).  Any
    branch point lying on a grid ray inside the sector must coincide with a
    grid radius: the ray integral stops there and the remaining points of
    that ray are reached by short arcs from the neighbouring ray.

    Returns ``(values, ws)`` of shapes ``(nr, nt, 3)`` and ``(nr, nt)``.
    """
    radii = np.asarray(radii, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    nr, nt = len(radii), len(thetas)
    R = radii[-1]
    vals = np.full((nr, nt, 3), np.nan)
    ws = np.full((nr, nt), np.nan, dtype=complex)
    curve = data.domain
    z0 = complex(data.base_z)

    # base -> R on the real axis, then the outer arc through every theta
    lead = PathSpec.polyline([z0, R]) if abs(z0 - R) > 1e-14 else PathSpec()
    arc = PathSpec()
    prev = 0.0
    for t in thetas:
        if t - prev > 1e-14:
            piece = PathSpec.arc(0.0, R * np.exp(1j * prev), t - prev, pieces=max(1, int((t - prev) / 0.3) + 1))
            arc = arc.then(piece) if arc.segments else piece
        prev = t
    full = lead.then(arc) if lead.segments else arc
    pts, wlist = surface_points_along(data, full, tol) if full.segments else (np.zeros((1, 3)), [data.base_w])
    # waypoints: lead has <=1 segment; arc pieces subdivided, pick those at thetas
    way = np.array(full.waypoints) if full.segments else np.array([z0])
    for j, t in enumerate(thetas):
        k = int(np.argmin(np.abs(way - R * np.exp(1j * t))))
        vals[-1, j] = pts[k]
        ws[-1, j] = wlist[k]

    pending = []
    for j, t in enumerate(thetas):
        e = np.exp(1j * t)
        stops = _branch_radii_on_ray(curve, t, R)
        stop = stops[0] if stops else None
        if stop is not None and abs(stop - R) < 1e-14:
            inner = []
        else:
            inner = [i for i in range(nr - 2, -1, -1) if stop is None or radii[i] >= stop - 1e-14]
        if inner:
            zs = [R * e] + [radii[i] * e for i in inner]
            branch_end = stop is not None and abs(radii[inner[-1]] - stop) < 1e-14
            if radii[inner[-1]] == 0.0:
                branch_end = branch_end or 0.0 in [complex(b) for b in getattr(curve, "branch_points", [])]
            path = PathSpec.polyline(zs, branch_end=branch_end)
            p, wl = surface_points_along(data, path, tol, w0=ws[-1, j], offset=vals[-1, j])
            for n, i in enumerate(inner, start=1):
                vals[i, j] = p[n]
                ws[i, j] = wl[n]
        for i in range(nr - 1):
            if np.isnan(vals[i, j, 0]) and radii[i] > 0:
                pending.append((i, j))

    for _ in range(nt):
        if not pending:
            break
        left = []
        for i, j in pending:
            src = None
            for jj in (j - 1, j + 1):
                if 0 <= jj < nt and not np.isnan(vals[i, jj, 0]) and ws[i, jj] != 0:
                    src = jj
                    break
            if src is None:
                left.append((i, j))
                continue
            start = radii[i] * np.exp(1j * thetas[src])
            path = PathSpec.arc(0.0, start, thetas[j] - thetas[src])
            p, wl = surface_points_along(data, path, tol, w0=ws[i, src], offset=vals[i, src])
            vals[i, j] = p[-1]
            ws[i, j] = wl[-1]
        pending = left
    if pending:
        raise PreconditionError(f"could not reach grid points {pending[:3]}")
    if radii[0] == 0.0:
        apex = vals[0][~np.isnan(vals[0, :, 0])]
        vals[0] = apex[0]
        ws[0] = ws[0, 0] if not np.isnan(ws[0, 0]) else 0
    return vals, ws


def sector_radii(n_radial, extra=()):
    """Radii in ``[0, 1]`` crowded towards ``r = 1``, with the ``extra`` radii inserted exactly."""
    r = np.sin(0.5 * np.pi * np.arange(n_radial + 1) / n_radial)
    for x in extra:
        k = int(np.argmin(np.abs(r - x)))
        step = np.diff(r).min()
        if abs(r[k] - x) < 0.3 * step and 0 < k < n_radial:
            r[k] = x
        else:
            r = np.sort(np.append(r, x))
    return r


def _polar_mesh(vals, patch, causal, copy=0):
    nr, nt = vals.shape[:2]
    verts = np.vstack([vals[0, :1], vals[1:].reshape(-1, 3)])
    return TaggedMesh(verts, polar_faces(nr - 1, nt - 1), causal, patch, copy)


def polar_vertex_params(radii, thetas):
    rr = np.concatenate([[radii[0]], np.repeat(radii[1:], len(thetas))])
    tt = np.concatenate([[thetas[0]], np.tile(thetas, len(radii) - 1)])
    return rr, tt


def _guard_faces(faces, vertex_in_band):
    return vertex_in_band[faces].any(axis=1)


# --------------------------------------------------------------------------
# The fundamental piece


@dataclass
class FundamentalPiece:
    a: float
    radii: np.ndarray
    thetas: np.ndarray
    us: np.ndarray
    vs: np.ndarray
    max_values: np.ndarray
    min_values: np.ndarray
    hat_values: np.ndarray
    mesh: TaggedMesh
    weld_gaps: dict
    a_index: int
    metric: str = "lorentz"

    def boundary(self):
        """The four boundary arcs of the welded piece as point arrays."""
        k = self.a_index
        n = len(self.thetas) - 1
        return {
            "line1": np.vstack([self.max_values[:, 0], self.min_values[0], self.hat_values[k:, n]]),
            "line2": np.vstack([self.max_values[k:, n], self.min_values[-1], self.hat_values[:, 0]]),
            "plane": self.max_values[: k + 1, n],
            "plane_hat": self.hat_values[: k + 1, n],
        }


def sample_fundamental_piece(a, n_radial=16, n_angular=16, n_u=None, n_v=32, tol=1e-10,
                             weld_tol=WELD_TOL, guard=GUARD_BAND):
    """Sample and weld the maxface sector, its timelike extension and the re-extended sector.

    The extension grid shares the angular nodes of the sector (``n_u`` must
    equal ``n_angular``) so the fold curves weld vertex to vertex.
    """
    from .families import schwarz_h_zmc

    if min(n_radial, n_angular, n_v) < 8:
        raise PreconditionError("resolutions must be at least 8")
    n_u = n_angular if n_u is None else n_u
    if n_u != n_angular:
        raise PreconditionError("n_u must equal n_angular so the fold curves share vertices")
    data = schwarz_h_zmc(a).data
    radii = sector_radii(n_radial, extra=(a,))
    a_index = int(np.argmin(np.abs(radii - a)))
    thetas = np.pi / 3 * np.arange(n_angular + 1) / n_angular
    thetas[-1] = np.pi / 3
    vmax, _ = sample_polar(data, radii, thetas, tol)
    us = thetas.copy()
    vs = np.pi * np.arange(n_v + 1) / n_v
    nc = schwarz_h_null_curve(a)
    U, V = np.meshgrid(us, vs, indexing="ij")
    vmin = nc.extend(U, V)
    vhat = reextend_points(a, vmax)

    gaps = {
        "max-min": float(np.max(np.linalg.norm(vmax[-1] - vmin[:, 0], axis=1))),
        "min-maxhat": float(np.max(np.linalg.norm(vhat[-1][::-1] - vmin[:, -1], axis=1))),
    }
    worst = max(gaps.values())
    if worst > weld_tol:
        raise GlueError(f"fold curves do not weld: gap {worst:.3e}", worst)

    rr, _ = polar_vertex_params(radii, thetas)
    band_max = np.abs(rr - 1.0) < guard
    m_max = _polar_mesh(vmax, PATCH_MAX, CausalClass.SPACELIKE.code)
    m_hat = _polar_mesh(vhat, PATCH_MAXHAT, CausalClass.SPACELIKE.code)
    for m in (m_max, m_hat):
        m.causal[_guard_faces(m.faces, band_max)] = CausalClass.LIGHTLIKE.code
    m_min = TaggedMesh(vmin.reshape(-1, 3), grid_faces(len(us), len(vs)), CausalClass.TIMELIKE.code, PATCH_MIN, 0)
    vv = np.tile(vs, len(us))
    band_min = (vv < guard) | (np.pi - vv < guard)
    m_min.causal[_guard_faces(m_min.faces, band_min)] = CausalClass.LIGHTLIKE.code

    welded, _ = weld(concat_meshes([m_max, m_min, m_hat]), weld_tol)
    faces, _ = orient_consistently(welded.faces)
    welded.faces = faces
    return FundamentalPiece(a, radii, thetas, us, vs, vmax, vmin, vhat, welded, gaps, a_index)


@dataclass
class SectorSample:
    mesh: TaggedMesh
    values: np.ndarray
    ws: np.ndarray
    radii: np.ndarray
    thetas: np.ndarray


def sample_sector_mesh(data, n_radial=16, n_angular=16, angle=np.pi / 3, outer=1.0, tol=1e-10,
                       guard=GUARD_BAND):
    """Polar patch ``|z| <= outer``, ``0 <= arg z <= angle`` of any family's surface."""
    extra = []
    for b in getattr(data.domain, "branch_points", []):
        r = abs(b)
        if 0 < r <= outer and -1e-9 <= np.angle(b) <= angle + 1e-9:
            extra.append(r / outer)
    radii = outer * sector_radii(n_radial, extra)
    thetas = angle * np.arange(n_angular + 1) / n_angular
    vals, ws = sample_polar(data, radii, thetas, tol)
    mesh = _polar_mesh(vals, PATCH_MAX, CausalClass.SPACELIKE.code)
    if data.signature == "lorentz":
        rr, tt = polar_vertex_params(radii, thetas)
        z = rr * np.exp(1j * tt)
        g = data.g(z, np.ones_like(z))
        mesh.causal[_guard_faces(mesh.faces, np.abs(np.abs(g) - 1.0) < guard)] = CausalClass.LIGHTLIKE.code
    return SectorSample(mesh, vals, ws, radii, thetas)


def graph_mesh(fn, half_width=1.5, n=48):
    """Mesh of the graph ``x0 = fn(x1, x2)`` over a square, tagged by causal type."""
    s = np.linspace(-half_width, half_width, n + 1)
    X1, X2 = np.meshgrid(s, s, indexing="ij")
    verts = np.stack([fn(X1.ravel(), X2.ravel()), X1.ravel(), X2.ravel()], axis=1)
    faces = grid_faces(n + 1, n + 1)
    mesh = TaggedMesh(verts, faces, 0, PATCH_MAX, 0)
    mesh.causal = face_causal_codes(mesh, tol=1e-9)
    return mesh


# --------------------------------------------------------------------------
# Geometry of boundary arcs


def fit_line(points):
    """Least-squares line; returns ``(point, unit direction, max distance)``."""
    p = np.asarray(points, dtype=float)
    c = p.mean(axis=0)
    _, _, vt = np.linalg.svd(p - c)
    d = vt[0]
    r = p - c
    dist = np.linalg.norm(r - np.outer(r @ d, d), axis=1)
    return c, d, float(dist.max())


def fit_plane(points):
    """Least-squares plane; returns ``(point, unit normal, in-plane basis, max distance)``."""
    p = np.asarray(points, dtype=float)
    c = p.mean(axis=0)
    _, _, vt = np.linalg.svd(p - c)
    n = vt[2]
    return c, n, vt[:2], float(np.max(np.abs((p - c) @ n)))


def boundary_geometry(piece):
    """Line and plane fits of the four boundary arcs with residuals and plane types."""
    b = piece.boundary()
    out = {}
    for name in ("line1", "line2"):
        c, d, res = fit_line(b[name])
        out[name] = {"kind": "straight-line", "point": c, "direction": d, "residual": res}
    for name in ("plane", "plane_hat"):
        c, n, basis, res = fit_plane(b[name])
        cls = plane_causal_class(basis[0], basis[1])
        out[name] = {"kind": "planar-curve", "point": c, "normal": n, "residual": res,
                     "causal": cls.value}
    return out


def mesh_boundary_matches(piece, tol=1e-9):
    """True if the welded mesh boundary is exactly the union of the four arcs (one loop)."""
    mesh = piece.mesh
    be = boundary_edges(mesh.faces)
    bverts = mesh.vertices[np.unique(be)]
    arcs = np.vstack(list(piece.boundary().values()))
    d1, _ = cKDTree(arcs).query(bverts)
    d2, _ = cKDTree(bverts).query(arcs)
    n = mesh.n_vertices
    g = coo_matrix((np.ones(len(be)), (be[:, 0], be[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(g, directed=False)
    loops = len(np.unique(labels[np.unique(be)]))
    return bool(d1.max() <= tol and d2.max() <= tol and loops == 1), loops


# --------------------------------------------------------------------------
# Symmetries


@dataclass(frozen=True)
class SymmetryOp:
    linear: np.ndarray
    translation: np.ndarray
    kind: str = "identity"
    word: tuple = field(default=())

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3), "identity", ())

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def compose(self, other):
        """``self o other``."""
        return SymmetryOp(self.linear @ other.linear, self.linear @ other.translation + self.translation,
                          "composite", self.word + other.word)

    def inverse(self):
        inv = np.linalg.inv(self.linear)
        return SymmetryOp(inv, -inv @ self.translation, self.kind, tuple(reversed(self.word)))

    def key(self, decimals=6):
        return tuple(np.round(np.concatenate([self.linear.ravel(), self.translation]), decimals) + 0.0)

    def linear_key(self, decimals=6):
        return tuple(np.round(self.linear.ravel(), decimals) + 0.0)

    @property
    def determinant(self):
        return float(np.linalg.det(self.linear))


def line_half_turn(point, direction, metric="lorentz", name="line-rotation"):
    m = line_rotation(direction, metric)
    return SymmetryOp(m, point - m @ point, name, (name,))


def plane_mirror(point, normal, metric="lorentz", name="reflection"):
    """Reflection in the plane through ``point`` with Euclidean normal ``normal``."""
    n = np.asarray(normal, dtype=float)
    if metric == "lorentz":
        n = n * LORENTZ_DIAG  # Lorentz normal of the same plane
    m = plane_reflection(n, metric)
    return SymmetryOp(m, point - m @ point, name, (name,))


def piece_generators(piece):
    """Half-turns about the two boundary lines and reflections in the two boundary planes."""
    geo = boundary_geometry(piece)
    gens = [
        line_half_turn(geo["line1"]["point"], geo["line1"]["direction"], piece.metric, "rot-line1"),
        line_half_turn(geo["line2"]["point"], geo["line2"]["direction"], piece.metric, "rot-line2"),
        plane_mirror(geo["plane"]["point"], geo["plane"]["normal"], piece.metric, "refl-plane"),
        plane_mirror(geo["plane_hat"]["point"], geo["plane_hat"]["normal"], piece.metric, "refl-plane-hat"),
    ]
    return gens


def generators_are_isometries(gens, metric="lorentz", tol=1e-9):
    for g in gens:
        if metric == "lorentz":
            if not preserves_minkowski(g.linear, tol):
                return False
        elif np.max(np.abs(g.linear.T @ g.linear - np.eye(3))) > tol:
            return False
    return True


def symmetry_group(generators, depth, decimals=6):
    """Distinct products of at most ``depth`` generators (identity first)."""
    seen = {}
    ident = SymmetryOp.identity()
    seen[ident.key(decimals)] = ident
    frontier = [ident]
    for _ in range(depth):
        nxt = []
        for op in frontier:
            for g in generators:
                new = g.compose(op)
                new = replace(new, kind=g.kind if not op.word else "composite")
                k = new.key(decimals)
                if k not in seen:
                    seen[k] = new
                    nxt.append(new)
        frontier = nxt
    return list(seen.values())


def group_translations(ops, decimals=6, limit=None):
    """Translations ``g h^-1`` between group elements with equal linear part."""
    by_lin = {}
    for op in ops:
        by_lin.setdefault(op.linear_key(decimals), []).append(op.translation)
    vecs = []
    for ts in by_lin.values():
        ts = np.array(ts)
        if len(ts) < 2:
            continue
        d = (ts[:, None, :] - ts[None, :, :]).reshape(-1, 3)
        vecs.append(d[np.linalg.norm(d, axis=1) > 10.0 ** -decimals])
    if not vecs:
        return np.zeros((0, 3))
    v = np.vstack(vecs)
    # keep one of each +-pair: first non-negligible component positive
    rounded = np.round(v, decimals - 1)
    lead = np.argmax(rounded != 0, axis=1)
    v = v * np.sign(rounded[np.arange(len(v)), lead])[:, None]
    _, idx = np.unique(np.round(v, decimals - 1) + 0.0, axis=0, return_index=True)
    v = v[np.sort(idx)]
    v = v[np.argsort(np.linalg.norm(v, axis=1), kind="stable")]
    return v[:limit] if limit else v


def lattice_from_group(ops, tol=1e-6, limit=80):
    return lattice_detect(group_translations(ops, limit=limit), tol=tol)


def dihedral_orbit(piece):
    """The six elements generated by the two plane reflections and the 3-fold rotation they make."""
    gens = piece_generators(piece)
    p, q = gens[2], gens[3]
    rot = p.compose(q)
    rot3 = rot.compose(rot).compose(rot)
    ops = symmetry_group([p, q], 6)
    axis_fixed = float(np.linalg.norm(rot.linear @ np.array([1.0, 0, 0]) - np.array([1.0, 0, 0])))
    closure = float(np.max(np.abs(np.concatenate([rot3.linear.ravel() - np.eye(3).ravel(), rot3.translation]))))
    return ops, {"order": len(ops), "closure": closure, "axis_deviation": axis_fixed}


def assemble(mesh, ops, weld_tol=WELD_TOL, orient=True):
    """Union of the images of ``mesh`` under ``ops`` with provenance and welding."""
    copies = []
    for k, op in enumerate(ops):
        copies.append(TaggedMesh(op.apply(mesh.vertices), mesh.faces, mesh.causal, mesh.patch, k))
    out, _ = weld(concat_meshes(copies), weld_tol)
    if orient and out.n_faces:
        out.faces, _ = orient_consistently(out.faces)
    return out


def translation_invariance(mesh, ops, basis, decimals=6, tol=1e-6):
    """Max nearest-neighbour distance of translated copies that the group realises.

    For each basis vector ``b`` every copy ``h`` with ``T_b h`` also in the
    group is translated by ``b`` and matched against the assembled cloud.
    Returns ``{index: (max distance, number of matched copies)}``.
    """
    keys = {op.key(decimals): i for i, op in enumerate(ops)}
    tree = cKDTree(mesh.vertices)
    out = {}
    for bi, b in enumerate(np.atleast_2d(basis)):
        worst, count = 0.0, 0
        for sgn in (1.0, -1.0):
            shift = SymmetryOp(np.eye(3), sgn * b)
            for op in ops:
                if shift.compose(op).key(decimals) not in keys:
                    continue
                pts = mesh.vertices[np.unique(mesh.faces[mesh.copy == keys[op.key(decimals)]])] + sgn * b
                if len(pts) == 0:
                    continue
                d, _ = tree.query(pts)
                worst = max(worst, float(d.max()))
                count += 1
        out[bi] = (worst, count)
    return out


# --------------------------------------------------------------------------
# Diagnostics


def face_causal_codes(mesh, tol=1e-9):
    """Causal class of each face's tangent plane computed from its edges."""
    v = mesh.vertices[mesh.faces]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    n = np.cross(e1, e2) * LORENTZ_DIAG
    norm2 = np.einsum("ij,ij->i", n, n)
    q = (-n[:, 0] ** 2 + n[:, 1] ** 2 + n[:, 2] ** 2) / np.maximum(norm2, 1e-300)
    out = np.full(len(q), CausalClass.LIGHTLIKE.code, dtype=np.int8)
    out[q < -tol] = CausalClass.SPACELIKE.code
    out[q > tol] = CausalClass.TIMELIKE.code
    return out


def causal_agreement(mesh):
    """Fraction of non-lightlike-tagged faces whose geometry agrees with the tag."""
    keep = mesh.causal != CausalClass.LIGHTLIKE.code
    if not keep.any():
        return 1.0
    geo = face_causal_codes(mesh)
    return float(np.mean(geo[keep] == mesh.causal[keep]))


def face_isometry_check(base, assembled, ops, rng, decimals=6):
    """Max distance between random assembled faces and their recomputed images."""
    tree = cKDTree(assembled.vertices)
    worst = 0.0
    for op in ops:
        fi = int(rng.integers(base.n_faces))
        img = op.apply(base.vertices[base.faces[fi]])
        d, _ = tree.query(img)
        worst = max(worst, float(d.max()))
    return worst


def _tri_boxes(v):
    return v.min(axis=1), v.max(axis=1)


def _segment_hits(p0, p1, tri, eps=1e-12):
    """Moller-Trumbore test of segments ``p0 -> p1`` against triangles (row-wise)."""
    d = p1 - p0
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) > eps
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    s = p0 - tri[:, 0]
    u = inv * np.einsum("ij,ij->i", s, h)
    q = np.cross(s, e1)
    v = inv * np.einsum("ij,ij->i", d, q)
    t = inv * np.einsum("ij,ij->i", e2, q)
    return ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (t >= 0) & (t <= 1)


def self_intersection_report(mesh, max_samples=10):
    """Count intersecting pairs of triangles that share no vertex.

    Broad phase: a k-d tree over triangle centroids with the largest
    bounding radius; narrow phase: edge-triangle tests in both directions.
    """
    if mesh.n_faces < 2:
        return {"count": 0, "samples": []}
    tri = mesh.vertices[mesh.faces]
    cen = tri.mean(axis=1)
    rad = np.linalg.norm(tri - cen[:, None, :], axis=2).max(axis=1)
    pairs = cKDTree(cen).query_pairs(2.0 * float(rad.max()), output_type="ndarray")
    if len(pairs) == 0:
        return {"count": 0, "samples": []}
    i, j = pairs[:, 0], pairs[:, 1]
    close = np.linalg.norm(cen[i] - cen[j], axis=1) <= rad[i] + rad[j]
    i, j = i[close], j[close]
    fi, fj = mesh.faces[i], mesh.faces[j]
    share = (fi[:, :, None] == fj[:, None, :]).any(axis=(1, 2))
    i, j = i[~share], j[~share]
    lo_i, hi_i = _tri_boxes(tri[i])
    lo_j, hi_j = _tri_boxes(tri[j])
    box = np.all((lo_i <= hi_j) & (lo_j <= hi_i), axis=1)
    i, j = i[box], j[box]
    hit = np.zeros(len(i), dtype=bool)
    for a, b in ((0, 1), (1, 2), (2, 0)):
        hit |= _segment_hits(tri[i][:, a], tri[i][:, b], tri[j])
        hit |= _segment_hits(tri[j][:, a], tri[j][:, b], tri[i])
    idx = np.flatnonzero(hit)
    samples = [(int(i[k]), int(j[k])) for k in idx[:max_samples]]
    return {"count": int(hit.sum()), "samples": samples}


def lorentz_gram(points):
    """``P^T eta P`` for a stack of vectors; handy for checking isometries."""
    p = np.asarray(points, dtype=float)
    return p @ ETA @ p.T


def induced_isometries(data, radii, thetas, values, ws, symmetries, rng=None, n=40, tol=1e-6):
    """Ambient isometries induced by anti-holomorphic curve symmetries.

    The linear part ``L`` solves ``Phi(psi p) dpsi = L conj(Phi(p))`` in the
    least-squares sense over random points.  The translation makes ``L``
    fix the sampled grid points that ``psi`` fixes on the curve (same ``z``
    and same sheet).  Returns ``(ops, residuals)``; an op whose fit fails
    ``tol`` is dropped.
    """
    from .families import random_curve_points

    rng = np.random.default_rng(0) if rng is None else rng
    R, T = np.meshgrid(radii, thetas, indexing="ij")
    zg = (R * np.exp(1j * T)).ravel()
    wg = np.asarray(ws, dtype=complex).ravel()
    xg = np.asarray(values, dtype=float).reshape(-1, 3)
    z, w = random_curve_points(data.domain, n, rng)
    phi = data.phi(z, w)
    ops, residuals = [], {}
    for sym in symmetries:
        zz, ww = sym.apply(z, w)
        lhs = data.phi(zz, ww) * sym.dzbar(z)[:, None]
        A = np.conj(phi)
        lt, *_ = np.linalg.lstsq(np.vstack([A.real, A.imag]), np.vstack([lhs.real, lhs.imag]), rcond=None)
        L = lt.T
        fit = float(np.max(np.abs(A @ L.T - lhs)))
        with np.errstate(all="ignore"):
            fz, fw = sym.apply(zg, wg)
        scale = np.maximum(1.0, np.abs(wg))
        fixed = (np.abs(fz - zg) < 1e-9) & (np.abs(fw - wg) < 1e-7 * scale)
        if fixed.sum() < 2:
            residuals[sym.name] = {"form": fit, "edge": float("inf"), "fixed_points": int(fixed.sum())}
            continue
        edge = xg[fixed]
        t = np.mean(edge - edge @ L.T, axis=0)
        fix = float(np.max(np.linalg.norm(edge @ L.T + t - edge, axis=1)))
        residuals[sym.name] = {"form": fit, "edge": fix, "fixed_points": int(fixed.sum())}
        if fit <= tol and fix <= tol:
            ops.append(SymmetryOp(L, t, "curve-symmetry", (sym.name,)))
    return ops, residuals


def sheet_cover_ops(data, sample, symmetries, depth=3, tol=1e-6):
    """Isometries generated by the curve symmetries up to ``depth``, on both sheets.

    Products of the induced isometries reach neighbouring sectors and, since
    the surface has periods, translated copies too.  The sheet
    swap ``(z, w) -> (z, -w)`` acts as ``x -> 2 f(0) - x`` because ``z = 0``
    is a branch point.
    """
    ops, residuals = induced_isometries(data, sample.radii, sample.thetas, sample.values, sample.ws,
                                        symmetries, tol=tol)
    group = symmetry_group(ops, depth)
    swap = SymmetryOp(-np.eye(3), 2.0 * sample.values[0, 0], "sheet-swap", ("sheet-swap",))
    seen = {op.key(): op for op in group}
    for op in group:
        new = swap.compose(op)
        seen.setdefault(new.key(), new)
    return list(seen.values()), residuals

