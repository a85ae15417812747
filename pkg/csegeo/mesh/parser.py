"""
Mesh parsing module for csegeo.
This module reads the Wavefront OBJ and ASCII PLY subsets used for canonical meshes.
"""

import os
from dataclasses import dataclass, field
from typing import Iterator, List, Tuple

import numpy as np

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import MeshFormatError, MeshValidationError
from csegeo.utils.logger import log_info


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MeshFormatError(f"mesh file is not UTF-8 text ({e.reason})")


def _fan(polygon: List[int]) -> List[Tuple[int, int, int]]:
    # (v0, v1, v2), (v0, v2, v3), ...
    return [(polygon[0], polygon[i], polygon[i + 1]) for i in range(1, len(polygon) - 1)]


def _assemble(vertices: List[List[float]], faces: List[Tuple[int, Tuple[int, int, int]]]) -> Mesh:
    """
    Range-check faces (reporting their source lines) and build the Mesh.
    """
    if not vertices:
        raise MeshValidationError("empty mesh: no vertices")
    if not faces:
        raise MeshValidationError("empty mesh: no faces")

    num_vertices = len(vertices)
    for line_no, triangle in faces:
        for index in triangle:
            if not 0 <= index < num_vertices:
                raise MeshFormatError(
                    f"face references vertex {index} (0-based) but the mesh has {num_vertices} vertices",
                    line_no,
                )
        if len(set(triangle)) != 3:
            raise MeshFormatError("face repeats a vertex index", line_no)

    mesh = Mesh.from_arrays(
        np.asarray(vertices, dtype=np.float64),
        np.asarray([triangle for _, triangle in faces], dtype=np.int64),
    )
    log_info(f"Parsed mesh {mesh.mesh_id[:12]}: {mesh.num_vertices} vertices, {mesh.num_faces} faces")
    return mesh


def parse_obj(data: bytes) -> Mesh:
    """
    Parse Wavefront OBJ text.

    Only `v` and `f` records are interpreted. Face tokens may carry
    `v/vt/vn` slashes; only the vertex index is used. Indices are 1-based,
    negative indices count back from the most recent vertex, and polygons
    are fan-triangulated from their first vertex.

    Args:
        data: Raw file contents

    Returns:
        Validated Mesh
    """
    text = _decode(data)
    vertices: List[List[float]] = []
    faces: List[Tuple[int, Tuple[int, int, int]]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        record = tokens[0]

        if record == "v":
            if len(tokens) < 4:
                raise MeshFormatError("vertex record needs three coordinates", line_no)
            try:
                vertices.append([float(t) for t in tokens[1:4]])
            except ValueError:
                raise MeshFormatError(f"malformed vertex record {line!r}", line_no)
        elif record == "f":
            if len(tokens) < 4:
                raise MeshFormatError("face record needs at least three vertices", line_no)
            polygon = []
            for token in tokens[1:]:
                head = token.split("/", 1)[0]
                try:
                    index = int(head)
                except ValueError:
                    raise MeshFormatError(f"malformed face index {token!r}", line_no)
                if index == 0:
                    raise MeshFormatError("OBJ vertex indices start at 1", line_no)
                polygon.append(index - 1 if index > 0 else len(vertices) + index)
            faces.extend((line_no, triangle) for triangle in _fan(polygon))
        # vt, vn, g, o, s, usemtl, mtllib and the rest are ignored

    return _assemble(vertices, faces)


@dataclass
class _PlyProperty:
    name: str
    is_list: bool


@dataclass
class _PlyElement:
    name: str
    count: int
    line_no: int
    properties: List[_PlyProperty] = field(default_factory=list)


def _parse_ply_header(lines: List[str]) -> Tuple[List[_PlyElement], int]:
    if not lines or lines[0].strip() != "ply":
        raise MeshFormatError("missing 'ply' magic", 1)

    elements: List[_PlyElement] = []
    fmt = None
    for index in range(1, len(lines)):
        line_no = index + 1
        tokens = lines[index].split()
        if not tokens:
            continue
        keyword = tokens[0]
        if keyword == "format":
            if len(tokens) < 2:
                raise MeshFormatError("format line needs a format name", line_no)
            fmt = tokens[1]
            if fmt != "ascii":
                raise MeshFormatError(f"unsupported PLY format '{fmt}': only ascii is supported", line_no)
        elif keyword in ("comment", "obj_info"):
            continue
        elif keyword == "element":
            if len(tokens) != 3:
                raise MeshFormatError("element line needs a name and a count", line_no)
            try:
                count = int(tokens[2])
            except ValueError:
                raise MeshFormatError(f"element count {tokens[2]!r} is not an integer", line_no)
            if count < 0:
                raise MeshFormatError("element count must be nonnegative", line_no)
            elements.append(_PlyElement(tokens[1], count, line_no))
        elif keyword == "property":
            if not elements:
                raise MeshFormatError("property declared before any element", line_no)
            if len(tokens) >= 2 and tokens[1] == "list":
                if len(tokens) != 5:
                    raise MeshFormatError("list property needs count type, item type and name", line_no)
                elements[-1].properties.append(_PlyProperty(tokens[4], True))
            else:
                if len(tokens) != 3:
                    raise MeshFormatError("property needs a type and a name", line_no)
                elements[-1].properties.append(_PlyProperty(tokens[2], False))
        elif keyword == "end_header":
            if fmt is None:
                raise MeshFormatError("header has no format line", line_no)
            return elements, index + 1
        else:
            raise MeshFormatError(f"unknown header keyword {keyword!r}", line_no)

    raise MeshFormatError("header is not terminated by end_header", len(lines))


def _body_rows(lines: List[str], start: int) -> Iterator[Tuple[int, List[str]]]:
    for index in range(start, len(lines)):
        tokens = lines[index].split()
        if tokens:
            yield index + 1, tokens


def _read_row(element: _PlyElement, line_no: int, tokens: List[str]) -> List[object]:
    values: List[object] = []
    position = 0
    try:
        for prop in element.properties:
            if prop.is_list:
                count = int(tokens[position])
                position += 1
                items = [int(t) for t in tokens[position:position + count]]
                if len(items) != count:
                    raise IndexError
                position += count
                values.append(items)
            else:
                values.append(float(tokens[position]))
                position += 1
    except (IndexError, ValueError):
        raise MeshFormatError(f"malformed {element.name} record", line_no)
    if position != len(tokens):
        raise MeshFormatError(
            f"malformed {element.name} record: {len(tokens) - position} tokens past the declared properties",
            line_no,
        )
    return values


def parse_ply_ascii(data: bytes) -> Mesh:
    """
    Parse an ASCII PLY file with `vertex` (x, y, z) and `face`
    (vertex_indices list) elements. Other elements and properties are
    read and skipped.

    Args:
        data: Raw file contents

    Returns:
        Validated Mesh
    """
    lines = _decode(data).splitlines()
    elements, body_start = _parse_ply_header(lines)
    rows = _body_rows(lines, body_start)

    vertices: List[List[float]] = []
    faces: List[Tuple[int, Tuple[int, int, int]]] = []
    seen = {element.name for element in elements}
    if "vertex" not in seen:
        raise MeshFormatError("header declares no vertex element")
    if "face" not in seen:
        raise MeshFormatError("header declares no face element")

    for element in elements:
        names = [prop.name for prop in element.properties]
        if element.name == "vertex":
            missing = [axis for axis in ("x", "y", "z") if axis not in names]
            if missing:
                raise MeshFormatError(f"vertex element lacks properties {missing}", element.line_no)
            axes = [names.index(axis) for axis in ("x", "y", "z")]
        elif element.name == "face":
            key = "vertex_indices" if "vertex_indices" in names else "vertex_index"
            if key not in names or not element.properties[names.index(key)].is_list:
                raise MeshFormatError("face element lacks a vertex_indices list", element.line_no)
            face_key = names.index(key)

        for read in range(element.count):
            try:
                line_no, tokens = next(rows)
            except StopIteration:
                raise MeshFormatError(
                    f"truncated body: element '{element.name}' declares {element.count} "
                    f"entries but only {read} are present",
                    len(lines),
                )
            values = _read_row(element, line_no, tokens)
            if element.name == "vertex":
                vertices.append([values[i] for i in axes])
            elif element.name == "face":
                polygon = values[face_key]
                if len(polygon) < 3:
                    raise MeshFormatError("face needs at least three vertices", line_no)
                faces.extend((line_no, triangle) for triangle in _fan(polygon))

    return _assemble(vertices, faces)


def load_mesh(path: str) -> Mesh:
    """
    Load a mesh file, dispatching on its extension.

    Args:
        path: Path to a .obj or .ply file

    Returns:
        Validated Mesh
    """
    extension = os.path.splitext(path)[1].lower()
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise MeshFormatError(f"cannot read mesh file {path}: {e.strerror}")

    if extension == ".obj":
        return parse_obj(data)
    if extension == ".ply":
        return parse_ply_ascii(data)
    raise MeshFormatError(f"unsupported mesh format '{extension}': use .obj or .ply")
