"""
Truncated Laplace-Beltrami eigenbasis and Fourier analysis/synthesis.
"""

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from csegeo.spectral.operators import Operators
from csegeo.utils.errors import MismatchError, ParameterError, SpectralError
from csegeo.utils.logger import log_info, log_warning
from csegeo.utils.settings import DENSE_EIGEN_LIMIT, LANCZOS_MAXITER

# Eigenvalues closer than this (relative) are treated as one degenerate cluster
CLUSTER_RTOL = 1e-8

# Decimals used to compare eigenvector entries when ordering a cluster
ORDER_DECIMALS = 10

EigenMethod = Literal["auto", "dense", "lanczos"]


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """
    The M smallest generalized eigenpairs WU = AUΛ of one mesh.

    Columns of U are A-orthonormal and ordered by ascending eigenvalue.
    `basis_id` is the hash of the mesh the basis was computed on.
    """

    U: np.ndarray
    eigenvalues: np.ndarray
    mass: np.ndarray
    mesh_id: str

    @property
    def basis_id(self) -> str:
        return self.mesh_id

    @property
    def num_vertices(self) -> int:
        return int(self.U.shape[0])

    @property
    def num_eigen(self) -> int:
        return int(self.U.shape[1])

    @property
    def total_area(self) -> float:
        return float(np.sum(self.mass))

    def truncate(self, m: int) -> "SpectralBasis":
        """Keep the first m eigenpairs."""
        if not 1 <= m <= self.num_eigen:
            raise ParameterError(f"cannot truncate a basis of order {self.num_eigen} to {m}")
        if m == self.num_eigen:
            return self
        return SpectralBasis(
            U=self.U[:, :m], eigenvalues=self.eigenvalues[:m], mass=self.mass, mesh_id=self.mesh_id
        )

    def rescaled(self, factor: float) -> "SpectralBasis":
        """
        Basis of the same mesh with its vertices scaled by `factor`.

        Areas scale by factor², eigenvalues by 1/factor² and eigenvectors
        by 1/factor (to stay A-orthonormal). The mesh hash is kept, so the
        result still binds to annotations made on the unscaled mesh.
        """
        factor = float(factor)
        if not np.isfinite(factor) or factor <= 0:
            raise ParameterError(f"scale factor must be positive, got {factor}")
        return SpectralBasis(
            U=self.U / factor,
            eigenvalues=self.eigenvalues / factor ** 2,
            mass=self.mass * factor ** 2,
            mesh_id=self.mesh_id,
        )

    def with_total_area(self, area: float) -> "SpectralBasis":
        """Rescale so the mesh has the given total area."""
        if area <= 0:
            raise ParameterError(f"target area must be positive, got {area}")
        return self.rescaled(np.sqrt(area / self.total_area))


def _dense_eigenpairs(operators: Operators, count: int):
    inv_sqrt = 1.0 / np.sqrt(operators.A)
    scaling = sparse.diags(inv_sqrt)
    symmetric = (scaling @ operators.W @ scaling).toarray()
    symmetric = 0.5 * (symmetric + symmetric.T)
    try:
        values, vectors = scipy.linalg.eigh(symmetric, subset_by_index=[0, count - 1])
    except np.linalg.LinAlgError as e:
        raise SpectralError(f"dense eigensolver failed: {e}")
    return values, inv_sqrt[:, None] * vectors


def _lanczos_eigenpairs(operators: Operators, count: int):
    num_vertices = operators.num_vertices
    if count >= num_vertices - 1:
        raise ParameterError(
            f"Lanczos path needs M < K - 1 (M={count}, K={num_vertices}); "
            f"raise CSEGEO_DENSE_EIGEN_LIMIT to use the dense solver"
        )
    # W is singular; shift slightly below zero so the factorization exists
    typical = float(np.mean(operators.W.diagonal() / operators.A))
    sigma = -1e-6 * typical
    v0 = np.random.default_rng(0).standard_normal(num_vertices)
    try:
        values, vectors = sparse_linalg.eigsh(
            operators.W.tocsc(),
            k=count,
            M=sparse.diags(operators.A).tocsc(),
            sigma=sigma,
            which="LM",
            v0=v0,
            maxiter=LANCZOS_MAXITER,
        )
    except sparse_linalg.ArpackNoConvergence as e:
        raise SpectralError(
            f"Lanczos eigensolver did not converge within {LANCZOS_MAXITER} iterations "
            f"({len(e.eigenvalues)} of {count} eigenpairs found)"
        )
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column is made positive
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _order_clusters(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Sort columns within each degenerate eigenvalue cluster lexicographically."""
    count = values.shape[0]
    scale = max(float(np.max(np.abs(values))), 1e-300)
    order = np.arange(count)
    start = 0
    while start < count:
        end = start + 1
        while end < count and values[end] - values[start] <= CLUSTER_RTOL * max(abs(values[end]), 1e-4 * scale):
            end += 1
        if end - start > 1:
            block = list(range(start, end))
            block.sort(key=lambda j: tuple(np.round(vectors[:, j], ORDER_DECIMALS)), reverse=True)
            order[start:end] = block
        start = end
    return vectors[:, order]


def eigenbasis(operators: Operators, count: int, method: EigenMethod = "auto") -> SpectralBasis:
    """
    Compute the `count` smallest generalized eigenpairs of (W, diag(A)).

    Uses a dense solve of A^{-1/2} W A^{-1/2} up to CSEGEO_DENSE_EIGEN_LIMIT
    vertices and shift-invert Lanczos above that.

    Args:
        operators: Assembled operators of a connected mesh
        count: Number of eigenpairs M, 1 <= M <= K
        method: "auto", "dense" or "lanczos"

    Returns:
        SpectralBasis with deterministic signs and constant first column
    """
    num_vertices = operators.num_vertices
    if not 1 <= count <= num_vertices:
        raise ParameterError(f"eigenpair count must be in [1, {num_vertices}], got {count}")
    if method not in ("auto", "dense", "lanczos"):
        raise ParameterError(f"unknown eigensolver method {method!r}")

    use_dense = method == "dense" or (method == "auto" and num_vertices <= DENSE_EIGEN_LIMIT)
    if use_dense:
        values, vectors = _dense_eigenpairs(operators, count)
    else:
        values, vectors = _lanczos_eigenpairs(operators, count)

    if values[0] < -1e-8 * max(1.0, abs(values[-1])):
        log_warning(f"Smallest eigenvalue {values[0]:.3e} is negative; clipping to zero")
    values = np.maximum(values, 0.0)
    # Connected mesh: the kernel of W is exactly the constants
    values[0] = 0.0

    vectors = _fix_signs(vectors)
    vectors = _order_clusters(values, vectors)
    vectors[:, 0] = 1.0 / np.sqrt(operators.total_area)

    values.setflags(write=False)
    vectors.setflags(write=False)
    log_info(
        f"Computed {count} eigenpairs for {num_vertices} vertices "
        f"({'dense' if use_dense else 'lanczos'}), largest eigenvalue {values[-1]:.4g}"
    )
    return SpectralBasis(U=vectors, eigenvalues=values, mass=operators.A, mesh_id=operators.mesh_id)


def analyze(basis: SpectralBasis, r: np.ndarray) -> np.ndarray:
    """
    Spectral coefficients r̂ = Uᵀ A r.

    Args:
        basis: Spectral basis
        r: Length-K function, or (K, D) stack of functions

    Returns:
        Length-M coefficients (or (M, D))
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape[0] != basis.num_vertices:
        raise MismatchError(f"function has {r.shape[0]} values but the basis has {basis.num_vertices} vertices")
    weighted = basis.mass * r if r.ndim == 1 else basis.mass[:, None] * r
    return basis.U.T @ weighted


def synthesize(basis: SpectralBasis, coefficients: np.ndarray) -> np.ndarray:
    """Function r = U r̂ from spectral coefficients."""
    coefficients = np.asarray(coefficients, dtype=np.float64)
    if coefficients.shape[0] != basis.num_eigen:
        raise MismatchError(
            f"got {coefficients.shape[0]} coefficients but the basis has {basis.num_eigen} eigenpairs"
        )
    return basis.U @ coefficients


def low_pass(basis: SpectralBasis, r: np.ndarray, m: Optional[int] = None) -> np.ndarray:
    """Project r onto the first m eigenfunctions (all of them by default)."""
    truncated = basis if m is None else basis.truncate(m)
    return synthesize(truncated, analyze(truncated, r))
