"""
Continuous surface embeddings stored in spectral form (E = UÊ).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from csegeo.fmaps.functional_map import FunctionalMap, PointMap, nearest_rows
from csegeo.spectral.basis import SpectralBasis
from csegeo.utils.errors import MismatchError, NumericalError, ParameterError


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """
    Spectral coefficients Ê (M x D) of a per-vertex embedding, bound to a basis.
    """

    E_hat: np.ndarray
    basis_id: str

    def __post_init__(self):
        if self.E_hat.ndim != 2:
            raise ParameterError(f"E_hat must be a matrix, got shape {self.E_hat.shape}")
        if not np.all(np.isfinite(self.E_hat)):
            raise NumericalError("embedding coefficients are not finite")

    @property
    def num_eigen(self) -> int:
        return int(self.E_hat.shape[0])

    @property
    def dim(self) -> int:
        return int(self.E_hat.shape[1])

    @classmethod
    def zeros(cls, num_eigen: int, dim: int, basis_id: str) -> "EmbeddingSet":
        return cls(E_hat=np.zeros((num_eigen, dim)), basis_id=basis_id)

    @classmethod
    def random(cls, num_eigen: int, dim: int, basis_id: str, scale: Optional[float] = None,
               seed: int = 0) -> "EmbeddingSet":
        """Gaussian coefficients with standard deviation `scale` (1/sqrt(M) by default)."""
        scale = 1.0 / np.sqrt(num_eigen) if scale is None else scale
        rng = np.random.default_rng(seed)
        return cls(E_hat=scale * rng.standard_normal((num_eigen, dim)), basis_id=basis_id)

    def check_basis(self, basis: SpectralBasis) -> None:
        if self.basis_id != basis.basis_id:
            raise MismatchError("embedding is bound to a different basis")
        if self.num_eigen != basis.num_eigen:
            raise MismatchError(f"embedding has order {self.num_eigen}, basis has {basis.num_eigen}")


@dataclass(frozen=True, eq=False)
class PixelBatch:
    """N (feature, vertex) supervision pairs."""

    features: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_arrays(cls, features, labels) -> "PixelBatch":
        features = np.array(features, dtype=np.float64)
        labels = np.array(labels, dtype=np.int64)
        if features.ndim != 2 or labels.ndim != 1 or features.shape[0] != labels.shape[0]:
            raise MismatchError(
                f"features {features.shape} and labels {labels.shape} do not describe the same rows"
            )
        if not np.all(np.isfinite(features)):
            raise NumericalError("feature rows must be finite")
        if labels.size and labels.min() < 0:
            raise ParameterError("labels must be nonnegative vertex indices")
        return cls(features=features, labels=labels)

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])

    def check_vertices(self, num_vertices: int) -> None:
        if self.size and self.labels.max() >= num_vertices:
            raise ParameterError(f"label {int(self.labels.max())} outside [0, {num_vertices})")

    def with_features(self, features: np.ndarray) -> "PixelBatch":
        return PixelBatch.from_arrays(features, self.labels)


def expand(embedding: EmbeddingSet, basis: SpectralBasis) -> np.ndarray:
    """Per-vertex embedding E = UÊ (K x D)."""
    embedding.check_basis(basis)
    return basis.U @ embedding.E_hat


def scores(E: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Logits s_k = -<e_k, φ> for one feature (K,) or a stack of features (N, K)."""
    return -(np.asarray(features, dtype=np.float64) @ E.T)


def posterior(E: np.ndarray, feature: np.ndarray) -> np.ndarray:
    """
    Vertex posterior p(k | φ) = softmax(-Eφ).

    Args:
        E: Per-vertex embedding (K x D)
        feature: Feature vector (D,) or stack (N x D)

    Returns:
        Distribution over the K vertices (per row for stacked features)
    """
    E = np.asarray(E, dtype=np.float64)
    feature = np.asarray(feature, dtype=np.float64)
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(feature))):
        raise NumericalError("posterior inputs must be finite")
    if feature.shape[-1] != E.shape[1]:
        raise MismatchError(f"feature dimension {feature.shape[-1]} does not match embedding dimension {E.shape[1]}")
    logits = scores(E, feature)
    logits = logits - np.max(logits, axis=-1, keepdims=True)
    weights = np.exp(logits)
    return weights / np.sum(weights, axis=-1, keepdims=True)


def predict(E: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Most probable vertex for every feature row (smallest index on ties)."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    return np.argmax(scores(E, features), axis=1)


def transfer(embedding: EmbeddingSet, fmap: FunctionalMap,
             src: Optional[SpectralBasis] = None, dst: Optional[SpectralBasis] = None,
             verify: bool = False) -> EmbeddingSet:
    """
    Carry an embedding across meshes: Ê' = CÊ.

    Args:
        embedding: Embedding on the source basis
        fmap: Functional map from that basis
        src: Source basis (required when verify is set)
        dst: Destination basis (required when verify is set)
        verify: Check U'Ê' = (U'CUᵀA)(UÊ) per vertex

    Returns:
        EmbeddingSet bound to the destination basis
    """
    if fmap.src_basis_id != embedding.basis_id:
        raise MismatchError("functional map does not start at the embedding's basis")
    if fmap.src_order != embedding.num_eigen:
        raise MismatchError(f"functional map order {fmap.src_order} does not match embedding order {embedding.num_eigen}")

    moved = EmbeddingSet(E_hat=fmap.C @ embedding.E_hat, basis_id=fmap.dst_basis_id)
    if verify:
        if src is None or dst is None:
            raise ParameterError("verification needs both bases")
        direct = dst.U[:, :fmap.dst_order] @ moved.E_hat
        through_vertices = fmap.vertex_operator(src, dst) @ (src.U[:, :fmap.src_order] @ embedding.E_hat)
        scale = max(1.0, float(np.max(np.abs(direct))))
        if not np.allclose(direct, through_vertices, rtol=0.0, atol=1e-8 * scale):
            raise NumericalError("per-vertex transfer disagrees with the spectral transfer")
    return moved


def assign_by_embedding(src_E: np.ndarray, dst_E: np.ndarray, src_mesh_id: str, dst_mesh_id: str) -> PointMap:
    """Map every destination vertex to the source vertex with the nearest embedding row."""
    if src_E.shape[1] != dst_E.shape[1]:
        raise MismatchError("embeddings have different dimensions")
    return PointMap.from_assignment(nearest_rows(src_E, dst_E), src_mesh_id, dst_mesh_id)


def embedding_colors(E: np.ndarray) -> np.ndarray:
    """
    RGB colors from the first three principal components of the embedding rows.

    Components are sign-fixed (largest-magnitude loading positive) and each
    channel is min-max scaled to [0, 255]; constant channels map to 128.

    Args:
        E: Per-vertex embedding (K x D)

    Returns:
        (K, 3) integer array
    """
    E = np.asarray(E, dtype=np.float64)
    centered = E - E.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:3]
    rows = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), rows])
    signs[signs == 0] = 1.0
    projected = centered @ (components * signs[:, None]).T
    if projected.shape[1] < 3:
        projected = np.hstack([projected, np.zeros((E.shape[0], 3 - projected.shape[1]))])

    colors = np.full((E.shape[0], 3), 128, dtype=np.int64)
    for channel in range(3):
        values = projected[:, channel]
        low, high = values.min(), values.max()
        if high - low > 1e-12 * max(1.0, abs(high)):
            colors[:, channel] = np.rint(255.0 * (values - low) / (high - low)).astype(np.int64)
    return colors
