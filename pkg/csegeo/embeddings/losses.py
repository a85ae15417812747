"""
Hard and geodesically smoothed cross-entropy losses with analytic gradients.

With logits s = -Eφ and posterior p = softmax(s), the gradient of the mean
cross-entropy against targets y with respect to the logits is (p - y)/N;
it is chained to E (-G_sᵀΦ), to the features (-G_s E) and to Ê (UᵀG_E).
"""

from typing import Mapping, Tuple

import numpy as np
from scipy.special import logsumexp

from csegeo.embeddings.embedding import EmbeddingSet, PixelBatch, expand, scores
from csegeo.geodesics.soft_labels import SoftLabelField
from csegeo.spectral.basis import SpectralBasis
from csegeo.utils.errors import MismatchError, ParameterError

# log of the smallest posterior entering a log
LOG_FLOOR = np.log(1e-300)

LossResult = Tuple[float, np.ndarray, np.ndarray]


def _cross_entropy(E: np.ndarray, features: np.ndarray, targets: np.ndarray) -> LossResult:
    logits = scores(E, features)
    log_p = logits - logsumexp(logits, axis=1, keepdims=True)
    loss = -float(np.mean(np.sum(targets * np.maximum(log_p, LOG_FLOOR), axis=1)))
    grad_scores = (np.exp(log_p) - targets) / features.shape[0]
    grad_E = -grad_scores.T @ features
    grad_features = -grad_scores @ E
    return loss, grad_E, grad_features


def _one_hot(labels: np.ndarray, num_vertices: int) -> np.ndarray:
    targets = np.zeros((labels.shape[0], num_vertices))
    targets[np.arange(labels.shape[0]), labels] = 1.0
    return targets


def _check_batch(batch: PixelBatch, num_vertices: int) -> None:
    if batch.size == 0:
        raise ParameterError("empty batch")
    batch.check_vertices(num_vertices)


def soft_targets(batch: PixelBatch, fields: Mapping[int, SoftLabelField], mesh_id: str,
                 num_vertices: int) -> np.ndarray:
    """Stack the soft-label distribution of every batch label into an N x K matrix."""
    sigmas = {(field.sigma, field.kernel) for field in fields.values()}
    if len(sigmas) > 1:
        raise MismatchError("soft-label fields mix different sigma or kernel values")
    rows = []
    for label in batch.labels:
        field = fields.get(int(label))
        if field is None:
            raise MismatchError(f"no soft-label field for vertex {int(label)}")
        if field.mesh_id != mesh_id or field.weights.shape[0] != num_vertices:
            raise MismatchError(f"soft-label field for vertex {int(label)} was built on a different mesh")
        rows.append(field.weights)
    return np.vstack(rows)


def hard_cross_entropy(E: np.ndarray, batch: PixelBatch) -> LossResult:
    """
    Mean negative log posterior of the labeled vertices for a per-vertex E.

    Returns:
        Tuple of (loss, gradient w.r.t. E, gradient w.r.t. features)
    """
    _check_batch(batch, E.shape[0])
    return _cross_entropy(E, batch.features, _one_hot(batch.labels, E.shape[0]))


def soft_cross_entropy(E: np.ndarray, batch: PixelBatch, targets: np.ndarray) -> LossResult:
    """Cross-entropy of a per-vertex E against an N x K matrix of target distributions."""
    _check_batch(batch, E.shape[0])
    if targets.shape != (batch.size, E.shape[0]):
        raise MismatchError(f"targets have shape {targets.shape}, expected {(batch.size, E.shape[0])}")
    return _cross_entropy(E, batch.features, targets)


def loss_hard(embedding: EmbeddingSet, basis: SpectralBasis, batch: PixelBatch) -> LossResult:
    """
    Hard cross-entropy of a spectral embedding.

    Args:
        embedding: Spectral coefficients Ê
        basis: Basis the embedding is bound to
        batch: Features and vertex labels

    Returns:
        Tuple of (loss, gradient w.r.t. Ê, gradient w.r.t. features)
    """
    E = expand(embedding, basis)
    loss, grad_E, grad_features = hard_cross_entropy(E, batch)
    return loss, basis.U.T @ grad_E, grad_features


def loss_soft(embedding: EmbeddingSet, basis: SpectralBasis, batch: PixelBatch,
              fields: Mapping[int, SoftLabelField]) -> LossResult:
    """
    Cross-entropy against geodesic soft labels g(·; k) of every batch label.

    Args:
        embedding: Spectral coefficients Ê
        basis: Basis the embedding is bound to
        batch: Features and vertex labels
        fields: Soft-label field per labeled vertex

    Returns:
        Tuple of (loss, gradient w.r.t. Ê, gradient w.r.t. features)
    """
    E = expand(embedding, basis)
    _check_batch(batch, E.shape[0])
    targets = soft_targets(batch, fields, basis.mesh_id, basis.num_vertices)
    loss, grad_E, grad_features = soft_cross_entropy(E, batch, targets)
    return loss, basis.U.T @ grad_E, grad_features
