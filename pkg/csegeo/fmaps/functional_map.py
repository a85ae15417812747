"""
Functional maps between spectral bases and their point-to-point decoding.

A FunctionalMap C (M' x M) sends spectral coefficients on the source mesh S
to coefficients on the destination S'. A PointMap lists, for every vertex of
S', the source vertex it is transported from (r'_i = r_{assignment[i]}), so
U'C ~ ΠU for the point map Π encoded by C.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.spatial import cKDTree

from csegeo.mesh.mesh import CorrespondenceSet, SymmetryMap
from csegeo.spectral.basis import SpectralBasis
from csegeo.utils.errors import MismatchError, ParameterError
from csegeo.utils.logger import log_debug, log_warning
from csegeo.utils.settings import WORKERS

# Neighbors inspected per query when breaking distance ties
TIE_CANDIDATES = 4

# Relative distance difference under which two rows count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FunctionalMap:
    """Spectral-domain map C bound to its source and destination bases."""

    C: np.ndarray
    src_basis_id: str
    dst_basis_id: str

    @property
    def dst_order(self) -> int:
        return int(self.C.shape[0])

    @property
    def src_order(self) -> int:
        return int(self.C.shape[1])

    @classmethod
    def identity(cls, m: int, basis_id: str) -> "FunctionalMap":
        if m < 1:
            raise ParameterError(f"functional map order must be positive, got {m}")
        return cls(C=np.eye(m), src_basis_id=basis_id, dst_basis_id=basis_id)

    def compose(self, inner: "FunctionalMap") -> "FunctionalMap":
        """
        The map `self ∘ inner`: apply `inner` (S -> S') first, then `self` (S' -> S'').
        """
        if inner.dst_basis_id != self.src_basis_id:
            raise MismatchError("cannot compose functional maps: inner destination is not outer source")
        if inner.dst_order != self.src_order:
            raise MismatchError(
                f"cannot compose functional maps of orders {self.C.shape} and {inner.C.shape}"
            )
        return FunctionalMap(C=self.C @ inner.C, src_basis_id=inner.src_basis_id, dst_basis_id=self.dst_basis_id)

    def transpose(self) -> "FunctionalMap":
        return FunctionalMap(C=self.C.T.copy(), src_basis_id=self.dst_basis_id, dst_basis_id=self.src_basis_id)

    def check_bases(self, src: SpectralBasis, dst: SpectralBasis) -> None:
        if self.src_basis_id != src.basis_id or self.dst_basis_id != dst.basis_id:
            raise MismatchError("functional map is bound to different bases")
        if self.src_order > src.num_eigen or self.dst_order > dst.num_eigen:
            raise MismatchError(
                f"functional map of shape {self.C.shape} exceeds basis orders ({dst.num_eigen}, {src.num_eigen})"
            )

    def vertex_operator(self, src: SpectralBasis, dst: SpectralBasis) -> np.ndarray:
        """Dense K' x K operator T = U'CUᵀA acting on per-vertex functions."""
        self.check_bases(src, dst)
        src_u = src.U[:, :self.src_order]
        dst_u = dst.U[:, :self.dst_order]
        return dst_u @ self.C @ (src_u.T * src.mass[None, :])


@dataclass(frozen=True, eq=False)
class PointMap:
    """For every destination vertex, the index of its source vertex."""

    assignment: np.ndarray
    src_mesh_id: str
    dst_mesh_id: str

    @property
    def size(self) -> int:
        return int(self.assignment.shape[0])

    @classmethod
    def from_assignment(cls, assignment: Iterable[int], src_mesh_id: str, dst_mesh_id: str,
                        num_src_vertices: Optional[int] = None) -> "PointMap":
        if not isinstance(assignment, np.ndarray):
            assignment = list(assignment)
        assignment = np.array(assignment, dtype=np.int64)
        if assignment.ndim != 1:
            raise ParameterError("point map assignment must be one-dimensional")
        if assignment.size and assignment.min() < 0:
            raise ParameterError("point map assignment contains negative indices")
        if num_src_vertices is not None and assignment.size and assignment.max() >= num_src_vertices:
            raise ParameterError(f"point map assignment exceeds the {num_src_vertices} source vertices")
        assignment.setflags(write=False)
        return cls(assignment=assignment, src_mesh_id=src_mesh_id, dst_mesh_id=dst_mesh_id)

    @classmethod
    def identity(cls, num_vertices: int, mesh_id: str) -> "PointMap":
        return cls.from_assignment(np.arange(num_vertices), mesh_id, mesh_id)

    def compose(self, inner: "PointMap") -> "PointMap":
        """
        Chain two point maps: `self` sends destination vertices to vertices of an
        intermediate mesh, `inner` sends those to its own source mesh.
        """
        if self.src_mesh_id != inner.dst_mesh_id:
            raise MismatchError("cannot compose point maps: intermediate meshes differ")
        if self.assignment.size and self.assignment.max() >= inner.size:
            raise MismatchError("point map indices exceed the intermediate mesh")
        return PointMap.from_assignment(inner.assignment[self.assignment], inner.src_mesh_id, self.dst_mesh_id)


def recovery_rate(pointmap: PointMap, truth: Iterable[int]) -> float:
    """Fraction of destination vertices mapped exactly to their true source vertex."""
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape != pointmap.assignment.shape:
        raise MismatchError(f"ground truth has {truth.shape[0]} entries, point map has {pointmap.size}")
    return float(np.mean(pointmap.assignment == truth))


def cfrom_pointmap(src: SpectralBasis, dst: SpectralBasis, pointmap: PointMap, beta: float = 0.0) -> FunctionalMap:
    """
    Encode a point map as a functional map.

    The data term is D = U'ᵀA'ΠU; the elementwise commutativity penalty gives
    the closed form C_ij = D_ij / (1 + β(λ'_i - λ_j)²).

    Args:
        src: Source basis (truncated to the wanted column order)
        dst: Destination basis (truncated to the wanted row order)
        pointmap: Destination-to-source vertex assignment
        beta: Commutativity weight (0 gives the plain projection)

    Returns:
        FunctionalMap of shape (dst.num_eigen, src.num_eigen)
    """
    if beta < 0:
        raise ParameterError(f"commutativity weight must be nonnegative, got {beta}")
    if pointmap.size != dst.num_vertices:
        raise MismatchError(f"point map covers {pointmap.size} vertices, destination has {dst.num_vertices}")
    if pointmap.src_mesh_id != src.mesh_id or pointmap.dst_mesh_id != dst.mesh_id:
        raise MismatchError("point map is bound to different meshes than the bases")
    if pointmap.size and pointmap.assignment.max() >= src.num_vertices:
        raise MismatchError("point map references vertices beyond the source mesh")

    data = dst.U.T @ (dst.mass[:, None] * src.U[pointmap.assignment])
    penalty = beta * (dst.eigenvalues[:, None] - src.eigenvalues[None, :]) ** 2
    return FunctionalMap(C=data / (1.0 + penalty), src_basis_id=src.basis_id, dst_basis_id=dst.basis_id)


def nearest_rows(reference: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """
    Exact nearest reference row (L2) for every query row.

    Among rows at the same distance the smallest index wins. The candidate
    set grows until the farthest candidate is no longer tied with the nearest.
    """
    num_rows = reference.shape[0]
    tree = cKDTree(reference)
    k = min(TIE_CANDIDATES, num_rows)
    while True:
        distances, indices = tree.query(queries, k=k, workers=WORKERS)
        if k == 1:
            return np.asarray(indices, dtype=np.int64)
        distances = np.asarray(distances)
        indices = np.asarray(indices, dtype=np.int64)
        cutoff = distances[:, :1] * (1.0 + TIE_RTOL)
        tied = distances <= cutoff
        if k == num_rows or not tied[:, -1].any():
            return np.where(tied, indices, num_rows).min(axis=1)
        k = min(2 * k, num_rows)


def pointmap_from_c(src: SpectralBasis, dst: SpectralBasis, fmap: FunctionalMap) -> PointMap:
    """
    Decode a functional map into a dense point map.

    Each row of U'C is matched to its nearest row of U (first src_order
    columns) with an exact KD-tree search.

    Args:
        src: Source basis
        dst: Destination basis
        fmap: Functional map from src to dst

    Returns:
        PointMap over all destination vertices
    """
    fmap.check_bases(src, dst)
    if not np.all(np.isfinite(fmap.C)):
        raise ParameterError("functional map has non-finite entries")
    embedded = dst.U[:, :fmap.dst_order] @ fmap.C
    assignment = nearest_rows(src.U[:, :fmap.src_order], embedded)
    return PointMap.from_assignment(assignment, src.mesh_id, dst.mesh_id)


def seed_cinit(src: SpectralBasis, dst: SpectralBasis, seeds: CorrespondenceSet, order: int,
               beta: float = 0.0, epsilon: float = 1e-8) -> FunctionalMap:
    """
    Initial functional map fitted to sparse seed correspondences.

    Solves, per column j, (PᵀP + diag(β(λ' - λ_j)² + ε)) c_j = Pᵀ t_j where P
    holds the seed rows of U' and T the matching rows of U.

    Args:
        src: Source basis
        dst: Destination basis
        seeds: (src_vertex, dst_vertex) pairs
        order: Order M1 of the square initial map
        beta: Commutativity weight
        epsilon: Ridge term

    Returns:
        FunctionalMap of shape (order, order)
    """
    if seeds.size == 0:
        raise ParameterError("seed correspondence set is empty")
    seeds.check_meshes(src.mesh_id, dst.mesh_id, src.num_vertices, dst.num_vertices)
    if not 1 <= order <= min(src.num_eigen, dst.num_eigen):
        raise ParameterError(
            f"initial order {order} must be in [1, {min(src.num_eigen, dst.num_eigen)}]"
        )
    if beta < 0 or epsilon < 0:
        raise ParameterError("beta and epsilon must be nonnegative")
    if seeds.size < order:
        log_warning(f"Only {seeds.size} seeds for an initial map of order {order}; relying on regularization")

    rows = dst.U[seeds.dst_vertices, :order]
    targets = src.U[seeds.src_vertices, :order]
    gram = rows.T @ rows
    rhs = rows.T @ targets
    dst_values = dst.eigenvalues[:order]
    src_values = src.eigenvalues[:order]

    C = np.empty((order, order))
    for j in range(order):
        regularizer = beta * (dst_values - src_values[j]) ** 2 + epsilon
        system = gram + np.diag(regularizer)
        try:
            C[:, j] = np.linalg.solve(system, rhs[:, j])
        except np.linalg.LinAlgError:
            raise ParameterError(
                f"seed system is singular at column {j}; add seeds or use epsilon > 0"
            )
    log_debug(f"Initialized order-{order} functional map from {seeds.size} seeds")
    return FunctionalMap(C=C, src_basis_id=src.basis_id, dst_basis_id=dst.basis_id)


def symmetry_operator(basis: SpectralBasis, symmetry: SymmetryMap, m: Optional[int] = None) -> np.ndarray:
    """
    Spectral representation Γ̂ = UᵀAΓU of a vertex involution, truncated to order m.
    """
    if symmetry.mesh_id != basis.mesh_id or symmetry.pairing.shape[0] != basis.num_vertices:
        raise MismatchError("symmetry map was built for a different mesh than the basis")
    truncated = basis if m is None else basis.truncate(m)
    U = truncated.U
    return U.T @ (truncated.mass[:, None] * U[symmetry.pairing])
