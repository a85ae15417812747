"""
Pydantic schemas for csegeo reports.
"""

from typing import Dict, List, Optional
from pydantic import BaseModel, Field


class EvalReport(BaseModel):
    """Schema for geodesic-error evaluation of predicted correspondences."""
    mean_geodesic_error: float = Field(..., description="Mean error in normalized units (diameter 2.5)")
    accuracy_at: Dict[str, float] = Field(..., description="Fraction of points with error <= threshold")
    per_point_errors: List[float] = Field(..., description="Geodesic error of every prediction")


class LevelStats(BaseModel):
    """Schema for one refinement level."""
    order: int = Field(..., description="Spectral order of this level")
    recovery: Optional[float] = Field(default=None, description="Exact-recovery rate against ground truth")


class ZoomOutReport(BaseModel):
    """Schema for the `csegeo zoomout` report."""
    src_mesh: str = Field(..., description="Source mesh hash")
    dst_mesh: str = Field(..., description="Destination mesh hash")
    seeds: int = Field(..., description="Number of seed correspondences")
    schedule: List[int] = Field(..., description="Spectral orders visited")
    levels: List[LevelStats] = Field(default_factory=list, description="Per-level statistics")
    final_recovery: Optional[float] = Field(default=None, description="Exact-recovery rate of the final map")
    evaluation: Optional[EvalReport] = Field(default=None, description="Geodesic error of the final map")


class FitReport(BaseModel):
    """Schema for the `csegeo fit` report."""
    loss_history: List[float] = Field(..., description="Loss at every iteration")
    accuracy: float = Field(..., description="Argmax accuracy over all vertices")
    unlabeled_accuracy: Optional[float] = Field(default=None, description="Argmax accuracy on unlabeled vertices")
    geodesic_error_quantiles: Dict[str, float] = Field(..., description="Quantiles of argmax geodesic error")
    unlabeled_mean_geodesic_error: Optional[float] = Field(default=None, description="Mean error on unlabeled vertices")
    labeled_vertices: int = Field(..., description="Distinct supervised vertices")
