import numpy as np
import pytest

from tpzmc import families as fam
from tpzmc.errors import PreconditionError
from tpzmc.mesh import (
    PATCH_MAX,
    PATCH_MAXHAT,
    PATCH_MIN,
    SymmetryOp,
    TaggedMesh,
    assemble,
    boundary_edges,
    causal_agreement,
    concat_meshes,
    face_isometry_check,
    generators_are_isometries,
    graph_mesh,
    grid_faces,
    lattice_from_group,
    mesh_boundary_matches,
    orient_consistently,
    piece_generators,
    polar_faces,
    sample_fundamental_piece,
    sample_sector_mesh,
    self_intersection_report,
    sheet_cover_ops,
    symmetry_group,
    translation_invariance,
    weld,
)


@pytest.fixture(scope="module")
def piece():
    return sample_fundamental_piece(0.5)


def test_face_builders():
    assert grid_faces(3, 4).shape == (2 * 2 * 3, 3)
    f = polar_faces(3, 5)
    # apex plus three rings of six vertices
    assert f.max() == 3 * 6 and len(f) == 5 + 2 * 2 * 5


def test_weld_and_orientation():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float)
    m = TaggedMesh(v, [[0, 1, 2], [3, 5, 4]], 0, 0, [0, 1])
    w, remap = weld(m)
    assert w.n_vertices == 4 and remap[3] == remap[1]
    faces, conflicts = orient_consistently(np.array([[0, 1, 2], [1, 2, 3]]))
    assert conflicts == 0
    assert len(boundary_edges(faces)) == 4
    with pytest.raises(PreconditionError):
        TaggedMesh(v, [[0, 1, 9]], 0, 0, 0)


def test_fundamental_piece(piece):
    m = piece.mesh
    assert max(piece.weld_gaps.values()) < 1e-12
    assert set(np.unique(m.patch)) == {PATCH_MAX, PATCH_MIN, PATCH_MAXHAT}
    assert orient_consistently(m.faces)[1] == 0
    ok, loops = mesh_boundary_matches(piece)
    assert ok and loops == 1
    assert causal_agreement(m) > 0.99
    with pytest.raises(PreconditionError):
        sample_fundamental_piece(0.5, n_u=10)


def test_group_and_assembly(piece):
    gens = piece_generators(piece)
    assert generators_are_isometries(gens)
    ops = symmetry_group(gens, 1)
    assert len(ops) == 5
    out = assemble(piece.mesh, ops)
    assert orient_consistently(out.faces)[1] == 0
    assert face_isometry_check(piece.mesh, out, ops, np.random.default_rng(0)) < 1e-12
    lat = lattice_from_group(symmetry_group(gens, 6))
    assert lat.rank == 3
    inv = translation_invariance(out, ops, lat.basis)
    assert all(d < 1e-9 for d, _ in inv.values())


def test_symmetry_op_algebra():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    op = SymmetryOp(q, rng.normal(size=3))
    p = rng.normal(size=(5, 3))
    assert np.allclose(op.inverse().apply(op.apply(p)), p)
    assert np.allclose(op.compose(op.inverse()).linear, np.eye(3))
    assert abs(abs(op.determinant) - 1) < 1e-12


def test_self_intersections():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0.2, 0.2, -0.5], [0.2, 0.2, 0.5], [0.8, 0.8, 0.5]], float)
    m = TaggedMesh(v, [[0, 1, 2], [3, 4, 5]], 0, 0, 0)
    assert self_intersection_report(m)["count"] == 1
    v2 = v.copy()
    v2[3:, 2] += 2.0
    assert self_intersection_report(TaggedMesh(v2, [[0, 1, 2], [3, 4, 5]], 0, 0, 0))["count"] == 0


def test_sector_and_cover():
    spec = fam.schwarz_h_r3(0.5)
    sample = sample_sector_mesh(spec.data, 10, 10)
    ops, residuals = sheet_cover_ops(spec.data, sample, fam.psi_symmetries(), depth=1)
    assert len(ops) == 8
    out = assemble(sample.mesh, ops)
    assert orient_consistently(out.faces)[1] == 0


def test_graph_mesh_tags():
    m = graph_mesh(fam.scherk_graph, 1.5, 12)
    assert m.n_faces == 2 * 12 * 12
    assert set(np.unique(m.causal)) <= {0, 1, 2}
    both = concat_meshes([m, m])
    assert both.n_faces == 2 * m.n_faces
