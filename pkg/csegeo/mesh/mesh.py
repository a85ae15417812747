"""
Triangle mesh and annotation types for csegeo.
This module holds the immutable containers every other module works on.
"""

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from csegeo.utils.errors import MeshValidationError, MismatchError

# Faces with a smaller area are rejected as degenerate
MIN_FACE_AREA = 1e-12

# Grid used to quantize vertex coordinates for content hashing
HASH_QUANTUM = 1e-6


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Immutable triangle mesh: the discretized canonical surface.

    Build instances with `Mesh.from_arrays`, which validates every invariant
    (index range, non-degenerate faces, connected edge graph) and derives the
    per-face areas and unit normals.
    """

    vertices: np.ndarray
    faces: np.ndarray
    face_areas: np.ndarray
    face_normals: np.ndarray

    @classmethod
    def from_arrays(cls, vertices: Iterable, faces: Iterable) -> "Mesh":
        """
        Validate raw arrays and build a Mesh.

        Args:
            vertices: (K, 3) array-like of coordinates
            faces: (F, 3) array-like of vertex indices

        Returns:
            Validated Mesh
        """
        vertices = np.asarray(vertices, dtype=np.float64)
        faces = np.asarray(faces)

        if vertices.size == 0 or faces.size == 0:
            raise MeshValidationError("empty mesh: at least one vertex and one face are required")
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise MeshValidationError(f"vertices must have shape (K, 3), got {vertices.shape}")
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise MeshValidationError(f"faces must have shape (F, 3), got {faces.shape}")
        if not np.all(np.isfinite(vertices)):
            raise MeshValidationError("vertex coordinates must be finite")
        if not np.issubdtype(faces.dtype, np.integer):
            if not np.all(np.mod(faces, 1) == 0):
                raise MeshValidationError("face indices must be integers")
        faces = faces.astype(np.int64)

        num_vertices = vertices.shape[0]
        bad = np.flatnonzero(np.any((faces < 0) | (faces >= num_vertices), axis=1))
        if bad.size:
            raise MeshValidationError(
                f"face {int(bad[0])} references a vertex outside [0, {num_vertices})"
            )
        repeated = np.flatnonzero(
            (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
        )
        if repeated.size:
            raise MeshValidationError(f"face {int(repeated[0])} repeats a vertex index")

        areas, normals = face_geometry(vertices, faces)
        degenerate = np.flatnonzero(areas <= MIN_FACE_AREA)
        if degenerate.size:
            raise MeshValidationError(
                f"face {int(degenerate[0])} is degenerate (area {areas[degenerate[0]]:.3e})"
            )

        mesh = cls(
            vertices=_frozen(vertices),
            faces=_frozen(faces),
            face_areas=_frozen(areas),
            face_normals=_frozen(normals),
        )
        components = mesh.num_components
        if components != 1:
            raise MeshValidationError(f"disconnected mesh: edge graph has {components} components")
        return mesh

    @property
    def num_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def num_faces(self) -> int:
        return int(self.faces.shape[0])

    @property
    def total_area(self) -> float:
        return float(np.sum(self.face_areas))

    @cached_property
    def mesh_id(self) -> str:
        """Content hash over quantized vertices and faces."""
        quantized = np.round(self.vertices / HASH_QUANTUM).astype("<i8")
        digest = hashlib.sha256()
        digest.update(np.asarray(quantized.shape, dtype="<i8").tobytes())
        digest.update(quantized.tobytes())
        digest.update(np.asarray(self.faces.shape, dtype="<i8").tobytes())
        digest.update(self.faces.astype("<i8").tobytes())
        return digest.hexdigest()

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted (E, 2) index pairs."""
        pairs = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        pairs = np.sort(pairs, axis=1)
        return _frozen(np.unique(pairs, axis=0))

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        edges = self.edges
        return _frozen(np.linalg.norm(self.vertices[edges[:, 0]] - self.vertices[edges[:, 1]], axis=1))

    @cached_property
    def edge_graph(self) -> sparse.csr_matrix:
        """Symmetric sparse adjacency weighted by Euclidean edge length."""
        edges = self.edges
        weights = self.edge_lengths
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        data = np.concatenate([weights, weights])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.num_vertices, self.num_vertices))

    @cached_property
    def num_components(self) -> int:
        count, _ = csgraph.connected_components(self.edge_graph, directed=False)
        return int(count)

    def scaled(self, factor: float) -> "Mesh":
        """Return a uniformly rescaled copy."""
        return Mesh.from_arrays(self.vertices * float(factor), self.faces)


def face_geometry(vertices: np.ndarray, faces: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-face areas A_f = |b1 x b2| / 2 and unit normals.

    Edge vectors follow b1 = X3 - X2, b2 = X1 - X3, b3 = X2 - X1.
    """
    x1 = vertices[faces[:, 0]]
    x2 = vertices[faces[:, 1]]
    x3 = vertices[faces[:, 2]]
    cross = np.cross(x3 - x2, x1 - x3)
    doubled = np.linalg.norm(cross, axis=1)
    areas = 0.5 * doubled
    with np.errstate(invalid="ignore", divide="ignore"):
        normals = cross / doubled[:, None]
    return areas, normals


@dataclass(frozen=True, eq=False)
class SymmetryMap:
    """
    Vertex involution Γ of a mesh (pairing[pairing[k]] == k).
    """

    pairing: np.ndarray
    mesh_id: str

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[int]], num_vertices: int, mesh_id: str) -> "SymmetryMap":
        """
        Build the involution from listed pairs.

        Each pair may be given once; vertices that are never listed are
        fixed points (they lie on the symmetry plane).
        """
        pairing = np.arange(num_vertices, dtype=np.int64)
        assigned = np.zeros(num_vertices, dtype=bool)
        for a, b in pairs:
            a, b = int(a), int(b)
            if not (0 <= a < num_vertices and 0 <= b < num_vertices):
                raise MeshValidationError(f"symmetry pair ({a}, {b}) outside [0, {num_vertices})")
            for k, partner in ((a, b), (b, a)):
                if assigned[k] and pairing[k] != partner:
                    raise MeshValidationError(
                        f"vertex {k} is paired with both {int(pairing[k])} and {partner}"
                    )
                pairing[k] = partner
                assigned[k] = True
        return cls.from_pairing(pairing, mesh_id)

    @classmethod
    def from_pairing(cls, pairing: Iterable[int], mesh_id: str) -> "SymmetryMap":
        pairing = np.asarray(pairing, dtype=np.int64)
        num_vertices = pairing.shape[0]
        if np.any((pairing < 0) | (pairing >= num_vertices)):
            raise MeshValidationError("symmetry pairing references vertices out of range")
        if not np.array_equal(pairing[pairing], np.arange(num_vertices)):
            raise MeshValidationError("symmetry pairing is not an involution")
        return cls(pairing=_frozen(pairing), mesh_id=mesh_id)

    def check_mesh(self, mesh: Mesh) -> None:
        if self.mesh_id != mesh.mesh_id or self.pairing.shape[0] != mesh.num_vertices:
            raise MismatchError("symmetry map was built for a different mesh")


@dataclass(frozen=True, eq=False)
class CorrespondenceSet:
    """Q seed correspondences (src_vertex, dst_vertex) between two meshes."""

    pairs: np.ndarray
    src_mesh_id: str
    dst_mesh_id: str

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], src_mesh_id: str, dst_mesh_id: str) -> "CorrespondenceSet":
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if pairs.shape[0] and np.unique(pairs[:, 0]).shape[0] != pairs.shape[0]:
            raise MeshValidationError("correspondence set lists a source vertex more than once")
        return cls(pairs=_frozen(pairs), src_mesh_id=src_mesh_id, dst_mesh_id=dst_mesh_id)

    @property
    def size(self) -> int:
        return int(self.pairs.shape[0])

    @property
    def src_vertices(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def dst_vertices(self) -> np.ndarray:
        return self.pairs[:, 1]

    def check_meshes(self, src_mesh_id: str, dst_mesh_id: str,
                     src_vertices: Optional[int] = None, dst_vertices: Optional[int] = None) -> None:
        """
        Verify the set is bound to the given meshes and its indices are valid.
        """
        if self.src_mesh_id != src_mesh_id:
            raise MismatchError(f"seed src_mesh {self.src_mesh_id} does not match basis mesh {src_mesh_id}")
        if self.dst_mesh_id != dst_mesh_id:
            raise MismatchError(f"seed dst_mesh {self.dst_mesh_id} does not match basis mesh {dst_mesh_id}")
        if src_vertices is not None and np.any((self.src_vertices < 0) | (self.src_vertices >= src_vertices)):
            raise MeshValidationError("seed source vertex out of range")
        if dst_vertices is not None and np.any((self.dst_vertices < 0) | (self.dst_vertices >= dst_vertices)):
            raise MeshValidationError("seed destination vertex out of range")
