"""Mesh and curve export: ASCII OBJ and PLY writers with matching readers,
grid meshing of parametrized patches, and CSV helpers.

All floats are written with 17 significant digits so re-imported meshes
reproduce the original vertex text bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "export_mesh",
    "import_mesh",
    "patch_to_mesh",
    "graph_to_mesh",
    "write_csv",
]

_FMT = "%.17g"


def patch_to_mesh(patch, nu=50, nv=50, shrink=0.0):
    """Vertex grid and triangle list of a patch: nu*nv vertices,
    2*(nu-1)*(nv-1) triangles."""
    from .surfaces import patch_grid

    _, _, P = patch_grid(patch, nu, nv, shrink=shrink)
    pts = P.reshape(-1, 3)
    faces = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j
            b = a + 1
            c = a + nv
            d = c + 1
            faces.append((a, b, c))
            faces.append((b, d, c))
    return pts, np.asarray(faces, dtype=int)


def grid_to_mesh(P):
    """Triangulate an (nu, nv, 3) sample grid."""
    nu, nv, _ = P.shape
    pts = P.reshape(-1, 3)
    faces = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j
            faces.append((a, a + 1, a + nv))
            faces.append((a + 1, a + nv + 1, a + nv))
    return pts, np.asarray(faces, dtype=int)


def graph_to_mesh(graph):
    """Ambient mesh of a solved section (x, y, height)."""
    pts = np.column_stack([graph.mesh.points, graph.heights])
    return pts, graph.mesh.triangles.copy()


def export_mesh(path, points, faces=None, fmt=None):
    """Write a mesh as ASCII OBJ or PLY (chosen by extension or ``fmt``)."""
    points = np.asarray(points, dtype=float)
    faces = np.asarray(faces, dtype=int) if faces is not None else np.empty((0, 3), int)
    kind = (fmt or str(path).rsplit(".", 1)[-1]).lower()
    if kind == "obj":
        lines = ["# ascii mesh"]
        for p in points:
            lines.append("v " + " ".join(_FMT % v for v in p))
        for f in faces:
            lines.append("f " + " ".join(str(i + 1) for i in f))
        text = "\n".join(lines) + "\n"
    elif kind == "ply":
        head = [
            "ply", "format ascii 1.0",
            f"element vertex {len(points)}",
            "property double x", "property double y", "property double z",
            f"element face {len(faces)}",
            "property list uchar int vertex_indices", "end_header",
        ]
        body = [" ".join(_FMT % v for v in p) for p in points]
        body += ["3 " + " ".join(str(i) for i in f) for f in faces]
        text = "\n".join(head + body) + "\n"
    else:
        raise ValueError(f"unknown mesh format {kind!r}")
    with open(path, "w") as fh:
        fh.write(text)
    return path


def import_mesh(path):
    """Read back an ASCII OBJ or PLY written by export_mesh."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0].startswith("ply"):
        nv = nf = 0
        i = 0
        for i, ln in enumerate(lines):
            if ln.startswith("element vertex"):
                nv = int(ln.split()[-1])
            elif ln.startswith("element face"):
                nf = int(ln.split()[-1])
            elif ln == "end_header":
                break
        verts = np.array([[float(v) for v in ln.split()] for ln in lines[i + 1:i + 1 + nv]])
        faces = np.array([[int(v) for v in ln.split()[1:]] for ln in lines[i + 1 + nv:i + 1 + nv + nf]],
                         dtype=int) if nf else np.empty((0, 3), int)
        return verts, faces
    verts = []
    faces = []
    for ln in lines:
        if ln.startswith("v "):
            verts.append([float(v) for v in ln.split()[1:4]])
        elif ln.startswith("f "):
            faces.append([int(v.split("/")[0]) - 1 for v in ln.split()[1:4]])
    return np.asarray(verts, dtype=float), np.asarray(faces, dtype=int)


def write_csv(path, header, rows):
    """Plain CSV: header row, '.' decimal separator, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_FMT % v if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row) + "\n")
    return path
