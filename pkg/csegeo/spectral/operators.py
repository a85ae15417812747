"""
Discrete differential operators on triangle meshes.

Per face f with corners (X1, X2, X3) and edge vectors b1 = X3 - X2,
b2 = X1 - X3, b3 = X2 - X1, the gradient of a piecewise-linear function
with corner values r_f is G_f r_f = N_f x (B_f r_f) / (2 A_f). The
stiffness matrix assembles W_f = A_f G_f^T G_f = B_f^T B_f / (4 A_f), which
is the cotangent Laplacian; the mass matrix is lumped (a third of each
incident face area per vertex).
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from csegeo.mesh.mesh import MIN_FACE_AREA, Mesh
from csegeo.utils.errors import MeshValidationError, ParameterError
from csegeo.utils.logger import log_debug


@dataclass(frozen=True, eq=False)
class Operators:
    """
    Stiffness W (K x K), lumped mass A (length K), gradient G (3F x K) and
    divergence D (K x 3F) of one mesh.
    """

    W: sparse.csr_matrix
    A: np.ndarray
    G: sparse.csr_matrix
    D: sparse.csr_matrix
    face_areas: np.ndarray
    mesh_id: str

    @property
    def num_vertices(self) -> int:
        return int(self.A.shape[0])

    @property
    def total_area(self) -> float:
        return float(np.sum(self.A))


def edge_matrices(mesh: Mesh) -> np.ndarray:
    """
    Stack B_f = [b1 b2 b3] for every face as an (F, 3, 3) array whose
    column i is the edge opposite corner i.
    """
    x1 = mesh.vertices[mesh.faces[:, 0]]
    x2 = mesh.vertices[mesh.faces[:, 1]]
    x3 = mesh.vertices[mesh.faces[:, 2]]
    return np.stack([x3 - x2, x1 - x3, x2 - x1], axis=2)


def _hat(normals: np.ndarray) -> np.ndarray:
    # Cross-product matrices: hat(n) @ v == n x v
    x, y, z = normals[..., 0], normals[..., 1], normals[..., 2]
    zero = np.zeros_like(x)
    return np.stack([
        np.stack([zero, -z, y], axis=-1),
        np.stack([z, zero, -x], axis=-1),
        np.stack([-y, x, zero], axis=-1),
    ], axis=-2)


def face_gradients(mesh: Mesh) -> np.ndarray:
    """All per-face 3x3 gradient matrices as an (F, 3, 3) array."""
    hat = _hat(mesh.face_normals)
    return np.einsum("fij,fjk->fik", hat, edge_matrices(mesh)) / (2.0 * mesh.face_areas)[:, None, None]


def face_gradient(mesh: Mesh, f: int) -> np.ndarray:
    """
    Gradient operator G_f of one face.

    Args:
        mesh: Mesh holding the face
        f: Face index

    Returns:
        3x3 matrix mapping corner values to the (constant) face gradient
    """
    if not 0 <= f < mesh.num_faces:
        raise ParameterError(f"face index {f} out of range [0, {mesh.num_faces})")
    area = mesh.face_areas[f]
    if area <= MIN_FACE_AREA:
        raise MeshValidationError(f"face {f} is degenerate")
    edges = edge_matrices(mesh)[f]
    return _hat(mesh.face_normals[f]) @ edges / (2.0 * area)


def build_operators(mesh: Mesh) -> Operators:
    """
    Assemble W, A, G and D for a validated, connected mesh.

    Faces are processed in index order and duplicate entries are summed in
    that order, so the result is bit-reproducible.

    Args:
        mesh: Mesh to discretize

    Returns:
        Operators
    """
    faces = mesh.faces
    areas = mesh.face_areas
    num_vertices = mesh.num_vertices
    num_faces = mesh.num_faces
    edges = edge_matrices(mesh)

    # Stiffness: W_f = B_f^T B_f / (4 A_f)
    local = np.einsum("fci,fcj->fij", edges, edges) / (4.0 * areas)[:, None, None]
    rows = np.broadcast_to(faces[:, :, None], local.shape)
    cols = np.broadcast_to(faces[:, None, :], local.shape)
    W = sparse.coo_matrix(
        (local.ravel(), (rows.ravel(), cols.ravel())), shape=(num_vertices, num_vertices)
    ).tocsr()

    # Lumped mass: a third of every incident face
    A = np.bincount(faces.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=num_vertices)

    # Gradient: rows 3f..3f+2, columns are the face corners
    gradients = face_gradients(mesh)
    grad_rows = (3 * np.arange(num_faces)[:, None, None] + np.arange(3)[None, :, None])
    grad_rows = np.broadcast_to(grad_rows, gradients.shape)
    grad_cols = np.broadcast_to(faces[:, None, :], gradients.shape)
    G = sparse.coo_matrix(
        (gradients.ravel(), (grad_rows.ravel(), grad_cols.ravel())), shape=(3 * num_faces, num_vertices)
    ).tocsr()

    # Divergence: each face adds half the outward flux b_i x N_f through the
    # edge opposite corner i to the contour integral around that corner
    flux = 0.5 * np.cross(np.moveaxis(edges, 2, 1), mesh.face_normals[:, None, :])
    div_rows = np.broadcast_to(faces[:, :, None], flux.shape)
    div_cols = np.broadcast_to(3 * np.arange(num_faces)[:, None, None] + np.arange(3)[None, None, :], flux.shape)
    D = sparse.coo_matrix(
        (flux.ravel(), (div_rows.ravel(), div_cols.ravel())), shape=(num_vertices, 3 * num_faces)
    ).tocsr()

    log_debug(f"Assembled operators for {num_vertices} vertices, {num_faces} faces")
    A.setflags(write=False)
    return Operators(W=W, A=A, G=G, D=D, face_areas=areas, mesh_id=mesh.mesh_id)


def dirichlet_energy(operators: Operators, r: np.ndarray) -> float:
    """Quadratic form r^T W r."""
    r = np.asarray(r, dtype=np.float64)
    return float(r @ (operators.W @ r))
