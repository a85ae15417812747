"""
Synthetic supervision and gradient-descent fitting of spectral embeddings.

The features of the synthetic stand-in live directly in embedding space:
a known teacher embedding provides one feature per supervised vertex.
"""

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from csegeo.embeddings.embedding import EmbeddingSet, PixelBatch, expand, predict, transfer
from csegeo.embeddings.losses import LossResult, loss_hard, loss_soft
from csegeo.fmaps.functional_map import FunctionalMap
from csegeo.geodesics.soft_labels import SoftLabelCache, SoftLabelField
from csegeo.mesh.mesh import Mesh
from csegeo.models.config import FitConfig, SyntheticConfig
from csegeo.models.reports import FitReport
from csegeo.services.evaluation import geodesic_errors
from csegeo.spectral.basis import SpectralBasis, analyze
from csegeo.utils.errors import MismatchError, NumericalError, ParameterError
from csegeo.utils.logger import log_debug, log_info

ERROR_QUANTILES = (0.5, 0.9, 0.99)


def make_teacher(basis: SpectralBasis, dim: int = 16, seed: int = 0) -> EmbeddingSet:
    """
    Smooth reference embedding with (nearly) unit-norm vertex rows.

    Random spectral coefficients decaying as 1/sqrt(1 + j) are expanded,
    each vertex row is normalized, and the result is projected back onto
    the basis.

    Args:
        basis: Spectral basis
        dim: Embedding dimension D
        seed: RNG seed

    Returns:
        EmbeddingSet bound to the basis
    """
    if dim < 1:
        raise ParameterError(f"embedding dimension must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    decay = 1.0 / np.sqrt(1.0 + np.arange(basis.num_eigen))
    coefficients = decay[:, None] * rng.standard_normal((basis.num_eigen, dim))
    E = basis.U @ coefficients
    norms = np.linalg.norm(E, axis=1, keepdims=True)
    E = E / np.where(norms > 0, norms, 1.0)
    return EmbeddingSet(E_hat=analyze(basis, E), basis_id=basis.basis_id)


def make_synthetic(config: SyntheticConfig, teacher: EmbeddingSet, basis: SpectralBasis) -> PixelBatch:
    """
    Draw (feature, vertex) pairs from a teacher embedding.

    A fraction `label_fraction` of the vertices is supervised; each emits
    `samples_per_vertex` features equal to its teacher row plus Gaussian noise.

    Args:
        config: Sampling settings
        teacher: Teacher embedding
        basis: Basis the teacher is bound to

    Returns:
        PixelBatch ordered by vertex index
    """
    if config.mesh_id is not None and config.mesh_id != basis.mesh_id:
        raise MismatchError("synthetic config names a different mesh than the basis")
    rng = np.random.default_rng(config.seed)
    num_vertices = basis.num_vertices
    count = max(1, int(round(config.label_fraction * num_vertices)))
    vertices = np.sort(rng.choice(num_vertices, size=count, replace=False))
    labels = np.repeat(vertices, config.samples_per_vertex)

    E = expand(teacher, basis)
    noise = rng.standard_normal((labels.shape[0], E.shape[1]))
    features = E[labels] + config.noise_std * noise
    log_debug(f"Drew {labels.shape[0]} samples over {count} vertices")
    return PixelBatch.from_arrays(features, labels)


class EmbeddingFitter:
    """
    Full-batch gradient descent on Ê (and optionally the features) for one mesh.
    """

    def __init__(self, basis: SpectralBasis, batch: PixelBatch, config: FitConfig,
                 mesh: Optional[Mesh] = None, fields: Optional[Mapping[int, SoftLabelField]] = None,
                 initial: Optional[EmbeddingSet] = None, cache: Optional[SoftLabelCache] = None):
        """
        Initialize the fitter.

        Args:
            basis: Basis the embedding lives on
            batch: Supervision
            config: Loss and optimizer settings
            mesh: Mesh of the basis (needed to build soft labels)
            fields: Precomputed soft-label fields keyed by vertex
            initial: Starting embedding (overrides config.init)
            cache: Soft-label cache shared between fitters
        """
        batch.check_vertices(basis.num_vertices)
        self.basis = basis
        self.batch = batch
        self.config = config
        self.history: List[float] = []
        self.fields = fields
        if config.loss_kind == "soft" and fields is None and batch.size:
            if mesh is None:
                raise ParameterError("soft loss needs the mesh to build soft labels")
            if mesh.mesh_id != basis.mesh_id:
                raise MismatchError("mesh does not match the basis")
            cache = cache or SoftLabelCache()
            self.fields = cache.fields_for(mesh, batch.labels, config.sigma, config.kernel)

        if initial is not None:
            initial.check_basis(basis)
            self.E_hat = initial.E_hat.copy()
        elif config.init == "zero":
            self.E_hat = np.zeros((basis.num_eigen, batch.features.shape[1]))
        else:
            self.E_hat = EmbeddingSet.random(
                basis.num_eigen, batch.features.shape[1], basis.basis_id, config.init_scale, config.seed
            ).E_hat.copy()

    @property
    def embedding(self) -> EmbeddingSet:
        return EmbeddingSet(E_hat=self.E_hat.copy(), basis_id=self.basis.basis_id)

    def loss(self) -> LossResult:
        embedding = EmbeddingSet(E_hat=self.E_hat, basis_id=self.basis.basis_id)
        if self.config.loss_kind == "soft":
            return loss_soft(embedding, self.basis, self.batch, self.fields)
        return loss_hard(embedding, self.basis, self.batch)

    def step(self) -> float:
        """
        Take one gradient step; returns the loss before the update.
        """
        iteration = len(self.history)
        if not np.all(np.isfinite(self.E_hat)):
            raise NumericalError(f"embedding became non-finite at iteration {iteration}")
        loss, grad_E_hat, grad_features = self.loss()
        if not np.isfinite(loss):
            raise NumericalError(f"loss became non-finite at iteration {iteration}")
        self.history.append(loss)
        self.E_hat = self.E_hat - self.config.step_size * grad_E_hat
        if self.config.update_features:
            self.batch = self.batch.with_features(self.batch.features - self.config.step_size * grad_features)
        return loss


def fit(basis: SpectralBasis, batch: PixelBatch, config: FitConfig, mesh: Optional[Mesh] = None,
        fields: Optional[Mapping[int, SoftLabelField]] = None,
        initial: Optional[EmbeddingSet] = None) -> Tuple[EmbeddingSet, List[float]]:
    """
    Fit Ê by gradient descent under the configured loss.

    Args:
        basis: Spectral basis
        batch: Supervision
        config: Loss and optimizer settings
        mesh: Mesh of the basis (soft loss)
        fields: Precomputed soft-label fields (soft loss)
        initial: Starting embedding

    Returns:
        Tuple of fitted EmbeddingSet and the loss before every iteration
    """
    if batch.size == 0:
        raise ParameterError("cannot fit an empty batch")
    fitter = EmbeddingFitter(basis, batch, config, mesh=mesh, fields=fields, initial=initial)
    for _ in range(config.iterations):
        fitter.step()
    log_info(
        f"Fitted {config.loss_kind} loss for {config.iterations} iterations: "
        f"{fitter.history[0]:.4g} -> {fitter.history[-1]:.4g}"
    )
    return fitter.embedding, fitter.history


def joint_fit(classes: Sequence[Tuple[SpectralBasis, PixelBatch]], source: EmbeddingSet,
              maps: Sequence[FunctionalMap], config: FitConfig,
              meshes: Optional[Sequence[Optional[Mesh]]] = None,
              transfer_init: bool = True) -> Tuple[List[EmbeddingSet], List[List[float]]]:
    """
    Fit one embedding per class, initialized by transfer from a source embedding.

    Gradient steps are interleaved round-robin over the classes. A class
    without labels keeps its transferred initialization.

    Args:
        classes: (basis, batch) per class
        source: Embedding on the source basis
        maps: Functional map from the source basis to each class basis
        config: Loss and optimizer settings shared by all classes
        meshes: Mesh per class (soft loss)
        transfer_init: Start from the transferred embedding instead of config.init

    Returns:
        Tuple of per-class embeddings and per-class loss histories
    """
    if len(maps) != len(classes):
        raise MismatchError(f"{len(classes)} classes but {len(maps)} functional maps")
    meshes = list(meshes) if meshes is not None else [None] * len(classes)
    if len(meshes) != len(classes):
        raise MismatchError(f"{len(classes)} classes but {len(meshes)} meshes")

    cache = SoftLabelCache()
    initial: List[EmbeddingSet] = []
    fitters: Dict[int, EmbeddingFitter] = {}
    for index, ((basis, batch), fmap) in enumerate(zip(classes, maps)):
        if fmap.dst_basis_id != basis.basis_id or fmap.dst_order != basis.num_eigen:
            raise MismatchError(f"functional map {index} does not end at the basis of class {index}")
        moved = transfer(source, fmap)
        initial.append(moved)
        if batch.size:
            start = moved if transfer_init else None
            fitters[index] = EmbeddingFitter(basis, batch, config, mesh=meshes[index], initial=start, cache=cache)

    for _ in range(config.iterations):
        for index in sorted(fitters):
            fitters[index].step()

    embeddings = [fitters[i].embedding if i in fitters else initial[i] for i in range(len(classes))]
    histories = [fitters[i].history if i in fitters else [] for i in range(len(classes))]
    log_info(f"Jointly fitted {len(fitters)} of {len(classes)} classes for {config.iterations} iterations")
    return embeddings, histories


def fit_report(mesh: Mesh, basis: SpectralBasis, teacher: EmbeddingSet, embedding: EmbeddingSet,
               batch: PixelBatch, history: Sequence[float]) -> FitReport:
    """
    Score a fitted embedding by querying it with every teacher row.

    Args:
        mesh: Mesh of the basis (normalized for meaningful errors)
        basis: Spectral basis
        teacher: Teacher embedding the features were drawn from
        embedding: Fitted embedding
        batch: Training supervision (defines labeled vertices)
        history: Loss history of the fit

    Returns:
        FitReport
    """
    truth = np.arange(basis.num_vertices)
    predicted = predict(expand(embedding, basis), expand(teacher, basis))
    errors = geodesic_errors(mesh, predicted, truth)

    labeled = np.zeros(basis.num_vertices, dtype=bool)
    labeled[batch.labels] = True
    unlabeled = ~labeled
    return FitReport(
        loss_history=[float(v) for v in history],
        accuracy=float(np.mean(predicted == truth)),
        unlabeled_accuracy=float(np.mean(predicted[unlabeled] == truth[unlabeled])) if unlabeled.any() else None,
        geodesic_error_quantiles={f"{q:g}": float(np.quantile(errors, q)) for q in ERROR_QUANTILES},
        unlabeled_mean_geodesic_error=float(np.mean(errors[unlabeled])) if unlabeled.any() else None,
        labeled_vertices=int(labeled.sum()),
    )
