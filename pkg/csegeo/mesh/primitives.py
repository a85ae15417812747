"""
Generated meshes used for oracles, synthetic experiments and tests.
"""

from typing import Optional

import numpy as np
import trimesh

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import ParameterError


def icosphere(subdivisions: int = 4, radius: float = 1.0) -> Mesh:
    """
    Subdivided icosahedron projected to a sphere.

    subdivisions=3 gives 642 vertices, 4 gives 2562.
    """
    sphere = trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius)
    return Mesh.from_arrays(np.asarray(sphere.vertices, dtype=np.float64), np.asarray(sphere.faces))


def grid(n: int = 64, size: float = 1.0) -> Mesh:
    """
    Flat n x n vertex grid over the square [0, size]^2 (z = 0).
    """
    if n < 2:
        raise ParameterError("grid needs at least 2 vertices per side")
    coords = np.linspace(0.0, size, n)
    xs, ys = np.meshgrid(coords, coords, indexing="xy")
    vertices = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n * n)])

    index = np.arange(n * n).reshape(n, n)
    lower_left = index[:-1, :-1].ravel()
    lower_right = index[:-1, 1:].ravel()
    upper_left = index[1:, :-1].ravel()
    upper_right = index[1:, 1:].ravel()
    faces = np.concatenate([
        np.column_stack([lower_left, lower_right, upper_right]),
        np.column_stack([lower_left, upper_right, upper_left]),
    ])
    return Mesh.from_arrays(vertices, faces)


def radial_noise(mesh: Mesh, amplitude: float, seed: int = 0) -> Mesh:
    """
    Scale every vertex radially by 1 + u, u ~ Uniform[-amplitude, amplitude].

    Vertex order is kept, so the identity is the ground-truth correspondence.
    """
    rng = np.random.default_rng(seed)
    factors = 1.0 + rng.uniform(-amplitude, amplitude, size=mesh.num_vertices)
    return Mesh.from_arrays(mesh.vertices * factors[:, None], mesh.faces)


def permute_vertices(mesh: Mesh, perm: np.ndarray) -> Mesh:
    """
    Relabel vertices: new vertex i is old vertex perm[i].

    As a point map from the original to the copy, `perm` is the ground truth.
    """
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (mesh.num_vertices,) or not np.array_equal(np.sort(perm), np.arange(mesh.num_vertices)):
        raise ParameterError("perm must be a permutation of the mesh vertices")
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(perm.shape[0])
    return Mesh.from_arrays(mesh.vertices[perm], inverse[mesh.faces])


def random_permutation(num_vertices: int, seed: Optional[int] = 0) -> np.ndarray:
    return np.random.default_rng(seed).permutation(num_vertices)
