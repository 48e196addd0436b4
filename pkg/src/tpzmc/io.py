"""OBJ and PLY export/import for tagged meshes; atomic file writes."""
import os
import tempfile

import numpy as np

from .mesh import CAUSAL_NAMES, PATCH_NAMES, TaggedMesh

_CAUSAL_CODES = {v: k for k, v in CAUSAL_NAMES.items()}
_PATCH_CODES = {v: k for k, v in PATCH_NAMES.items()}

PLY_FACE_DTYPE = np.dtype([("n", "u1"), ("v", "<i4", (3,)), ("causal", "i1"), ("patch", "i1"), ("copy", "<i4")])


def atomic_write(path, data):
    """Write ``data`` (bytes or str) to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _group_name(causal, patch, copy):
    return f"{CAUSAL_NAMES[int(causal)]}_{PATCH_NAMES.get(int(patch), str(int(patch)))}_copy{int(copy)}"


def obj_text(mesh):
    """OBJ text; floats use the shortest round-trip decimal form."""
    lines = [f"# tpzmc mesh: {mesh.n_vertices} vertices, {mesh.n_faces} faces"]
    lines.extend(f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in mesh.vertices)
    current = None
    for f, c, p, k in zip(mesh.faces, mesh.causal, mesh.patch, mesh.copy):
        tag = (int(c), int(p), int(k))
        if tag != current:
            lines.append(f"g {_group_name(*tag)}")
            lines.append(f"usemtl {CAUSAL_NAMES[tag[0]]}")
            current = tag
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    return "\n".join(lines) + "\n"


def export_obj(mesh, destination):
    atomic_write(destination, obj_text(mesh))


def read_obj(source):
    verts, faces, causal, patch, copy = [], [], [], [], []
    tag = (0, 0, 0)
    with open(source, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "g":
                c, p, k = parts[1].split("_")
                tag = (_CAUSAL_CODES[c], _PATCH_CODES.get(p, 0), int(k[len("copy"):]))
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
                causal.append(tag[0])
                patch.append(tag[1])
                copy.append(tag[2])
    return TaggedMesh(np.array(verts).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3),
                      causal, patch, copy)


def ply_bytes(mesh):
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        "comment tpzmc tagged mesh\n"
        f"element vertex {mesh.n_vertices}\n"
        "property double x\nproperty double y\nproperty double z\n"
        f"element face {mesh.n_faces}\n"
        "property list uchar int vertex_indices\n"
        "property char causal\nproperty char patch\nproperty int copy\n"
        "end_header\n"
    ).encode("ascii")
    verts = np.ascontiguousarray(mesh.vertices, dtype="<f8").tobytes()
    rec = np.zeros(mesh.n_faces, dtype=PLY_FACE_DTYPE)
    rec["n"] = 3
    rec["v"] = mesh.faces
    rec["causal"] = mesh.causal
    rec["patch"] = mesh.patch
    rec["copy"] = mesh.copy
    return header + verts + rec.tobytes()


def export_ply(mesh, destination):
    atomic_write(destination, ply_bytes(mesh))


def read_ply(source):
    with open(source, "rb") as fh:
        blob = fh.read()
    end = blob.index(b"end_header\n") + len(b"end_header\n")
    header = blob[:end].decode("ascii").splitlines()
    counts = {}
    for line in header:
        parts = line.split()
        if parts[:1] == ["element"]:
            counts[parts[1]] = int(parts[2])
    nv, nf = counts.get("vertex", 0), counts.get("face", 0)
    verts = np.frombuffer(blob, dtype="<f8", count=3 * nv, offset=end).reshape(nv, 3)
    rec = np.frombuffer(blob, dtype=PLY_FACE_DTYPE, count=nf, offset=end + 24 * nv)
    if nf and np.any(rec["n"] != 3):
        raise ValueError("only triangular faces are supported")
    return TaggedMesh(verts.copy(), rec["v"].astype(np.int64), rec["causal"], rec["patch"], rec["copy"])


def export_mesh(mesh, destination):
    """Dispatch on the file suffix (``.obj`` or ``.ply``)."""
    suffix = os.path.splitext(os.fspath(destination))[1].lower()
    if suffix == ".ply":
        export_ply(mesh, destination)
    elif suffix == ".obj":
        export_obj(mesh, destination)
    else:
        raise ValueError(f"unsupported mesh format {suffix!r}")
