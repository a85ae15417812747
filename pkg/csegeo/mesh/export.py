"""
Mesh writers for csegeo.
"""

from typing import Optional

import numpy as np

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import MeshFormatError, MismatchError, ParameterError


def _coord(value: float) -> str:
    # Shortest repr that parses back to the same double
    return repr(float(value))


def export_ply(mesh: Mesh, colors: Optional[np.ndarray] = None) -> bytes:
    """
    Serialize a mesh as ASCII PLY, optionally with per-vertex RGB.

    Args:
        mesh: Mesh to write
        colors: Optional (K, 3) integer array with components in [0, 255]

    Returns:
        PLY file contents
    """
    header = [
        "ply",
        "format ascii 1.0",
        "comment written by csegeo",
        f"element vertex {mesh.num_vertices}",
        "property double x",
        "property double y",
        "property double z",
    ]
    if colors is not None:
        header += ["property uchar red", "property uchar green", "property uchar blue"]
    header += [
        f"element face {mesh.num_faces}",
        "property list uchar int vertex_indices",
        "end_header",
    ]

    rows = []
    for k, vertex in enumerate(mesh.vertices):
        row = " ".join(_coord(c) for c in vertex)
        if colors is not None:
            row += " " + " ".join(str(int(c)) for c in colors[k])
        rows.append(row)
    rows.extend("3 " + " ".join(str(int(i)) for i in face) for face in mesh.faces)

    return ("\n".join(header + rows) + "\n").encode("ascii")


def export_vertex_colors(mesh: Mesh, colors) -> bytes:
    """
    Write a mesh with per-vertex colors as ASCII PLY.

    Args:
        mesh: Mesh to color
        colors: Length-K sequence of RGB triples in [0, 255]

    Returns:
        Deterministic PLY bytes
    """
    colors = np.asarray(colors)
    if colors.ndim != 2 or colors.shape[1] != 3:
        raise MismatchError(f"colors must be RGB triples, got shape {colors.shape}")
    if colors.shape[0] != mesh.num_vertices:
        raise MismatchError(f"got {colors.shape[0]} colors for a mesh with {mesh.num_vertices} vertices")
    if not np.all(np.isfinite(colors)) or np.any(np.mod(colors, 1) != 0):
        raise ParameterError("color components must be integers")
    if np.any((colors < 0) | (colors > 255)):
        raise ParameterError("color components must lie in [0, 255]")
    return export_ply(mesh, colors.astype(np.int64))


def write_obj(mesh: Mesh) -> bytes:
    """Serialize a mesh as Wavefront OBJ (1-based faces)."""
    lines = ["# written by csegeo"]
    lines.extend("v " + " ".join(_coord(c) for c in vertex) for vertex in mesh.vertices)
    lines.extend("f " + " ".join(str(int(i) + 1) for i in face) for face in mesh.faces)
    return ("\n".join(lines) + "\n").encode("ascii")


def write_mesh(mesh: Mesh, path: str) -> None:
    """Write a mesh to .obj or .ply, chosen by extension."""
    if path.lower().endswith(".obj"):
        data = write_obj(mesh)
    elif path.lower().endswith(".ply"):
        data = export_ply(mesh)
    else:
        raise ParameterError(f"cannot write mesh to {path}: use .obj or .ply")
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as e:
        raise MeshFormatError(f"cannot write {path}: {e.strerror}")
