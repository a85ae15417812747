"""
Geodesic-error evaluation of predicted vertex correspondences.
"""

from typing import Sequence

import numpy as np

from csegeo.geodesics.distance import distance_matrix, estimate_diameter
from csegeo.mesh.mesh import Mesh
from csegeo.models.reports import EvalReport
from csegeo.utils.errors import MismatchError, ParameterError
from csegeo.utils.logger import log_info, log_warning
from csegeo.utils.settings import TARGET_DIAMETER

DEFAULT_THRESHOLDS = (0.1, 0.2, 0.3)

# Sources per Dijkstra batch
CHUNK = 256

# Relative deviation from the target diameter that triggers a warning
DIAMETER_TOLERANCE = 0.05


def geodesic_errors(mesh: Mesh, predicted: Sequence[int], truth: Sequence[int]) -> np.ndarray:
    """
    Edge-graph geodesic distance between every predicted and true vertex.

    Args:
        mesh: Mesh the indices refer to
        predicted: Predicted vertex per point
        truth: True vertex per point

    Returns:
        Per-point errors
    """
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise MismatchError(f"{predicted.shape[0]} predictions but {truth.shape[0]} ground-truth vertices")
    for name, values in (("predicted", predicted), ("truth", truth)):
        if values.size and (values.min() < 0 or values.max() >= mesh.num_vertices):
            raise ParameterError(f"{name} vertex outside [0, {mesh.num_vertices})")

    errors = np.zeros(truth.shape[0])
    sources, inverse = np.unique(truth, return_inverse=True)
    for start in range(0, sources.shape[0], CHUNK):
        rows = distance_matrix(mesh, sources[start:start + CHUNK])
        points = np.flatnonzero((inverse >= start) & (inverse < start + CHUNK))
        errors[points] = rows[inverse[points] - start, predicted[points]]
    return errors


class Evaluator:
    """
    Geodesic-error evaluator bound to one mesh.
    """

    def __init__(self, mesh: Mesh, thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
                 check_normalized: bool = True):
        """
        Initialize the evaluator.

        Args:
            mesh: Mesh normalized to the target diameter
            thresholds: Accuracy thresholds in normalized units
            check_normalized: Warn when the mesh diameter is off target
        """
        if not thresholds or any(t < 0 for t in thresholds):
            raise ParameterError("thresholds must be a nonempty list of nonnegative values")
        self.mesh = mesh
        self.thresholds = sorted(float(t) for t in thresholds)
        if check_normalized:
            self._check_diameter()

    def _check_diameter(self) -> float:
        diameter = estimate_diameter(self.mesh, samples=16)
        if abs(diameter - TARGET_DIAMETER) > DIAMETER_TOLERANCE * TARGET_DIAMETER:
            log_warning(
                f"Mesh diameter is {diameter:.4g}, not {TARGET_DIAMETER}; errors are not in normalized units"
            )
        return diameter

    def evaluate(self, predicted: Sequence[int], truth: Sequence[int]) -> EvalReport:
        """
        Score predictions against ground truth.

        Args:
            predicted: Predicted vertex per point
            truth: True vertex per point

        Returns:
            EvalReport
        """
        errors = geodesic_errors(self.mesh, predicted, truth)
        mean = float(np.mean(errors)) if errors.size else 0.0
        accuracy = {
            f"{t:g}": (float(np.mean(errors <= t)) if errors.size else 1.0) for t in self.thresholds
        }
        log_info(f"Evaluated {errors.size} points: mean geodesic error {mean:.4g}")
        return EvalReport(
            mean_geodesic_error=mean,
            accuracy_at=accuracy,
            per_point_errors=[float(e) for e in errors],
        )


def evaluate(mesh: Mesh, predicted: Sequence[int], truth: Sequence[int],
             thresholds: Sequence[float] = DEFAULT_THRESHOLDS, check_normalized: bool = True) -> EvalReport:
    """Evaluate predictions on a mesh (see Evaluator.evaluate)."""
    return Evaluator(mesh, thresholds, check_normalized).evaluate(predicted, truth)
