"""
Pydantic schemas for csegeo configuration files.
"""

from typing import Literal, Optional
from pydantic import BaseModel, Field, model_validator


class SyntheticConfig(BaseModel):
    """Schema for synthetic (feature, vertex) supervision."""
    mesh_id: Optional[str] = Field(default=None, description="Mesh the supervision is drawn on")
    samples_per_vertex: int = Field(default=1, ge=1, description="Samples emitted per supervised vertex")
    noise_std: float = Field(default=0.0, ge=0.0, description="Gaussian noise added to teacher rows")
    label_fraction: float = Field(default=1.0, gt=0.0, le=1.0, description="Fraction of vertices with supervision")
    seed: int = Field(default=0, description="RNG seed")


class FitConfig(BaseModel):
    """Schema for gradient-descent fitting of spectral embeddings."""
    loss_kind: Literal["hard", "soft"] = Field(default="hard", description="Hard or geodesically smoothed cross-entropy")
    sigma: Optional[float] = Field(default=None, gt=0.0, description="Soft-label bandwidth (soft loss only)")
    kernel: Literal["linear", "squared"] = Field(default="linear", description="Soft-label exponent form")
    step_size: float = Field(default=1.0, gt=0.0, description="Gradient step size")
    iterations: int = Field(default=500, ge=1, description="Number of gradient steps")
    init: Literal["zero", "random"] = Field(default="random", description="Initialization of E_hat")
    init_scale: Optional[float] = Field(default=None, gt=0.0, description="Std of random init (default 1/sqrt(M))")
    update_features: bool = Field(default=False, description="Also update the feature rows")
    seed: int = Field(default=0, description="RNG seed for random init")

    @model_validator(mode="after")
    def _soft_needs_sigma(self):
        if self.loss_kind == "soft" and self.sigma is None:
            raise ValueError("soft loss requires sigma")
        return self


class TeacherConfig(BaseModel):
    """Schema for the synthetic teacher embedding."""
    dim: int = Field(default=16, ge=1, description="Embedding dimension D")
    seed: int = Field(default=0, description="RNG seed")


class FitRunConfig(BaseModel):
    """Schema for the `csegeo fit` config file."""
    teacher: TeacherConfig = Field(default_factory=TeacherConfig, description="Teacher embedding")
    synthetic: SyntheticConfig = Field(default_factory=SyntheticConfig, description="Synthetic supervision")
    fit: FitConfig = Field(default_factory=FitConfig, description="Optimizer settings")


class ZoomOutConfig(BaseModel):
    """Schema for the constrained multi-scale refinement."""
    start: int = Field(default=12, ge=1, description="First spectral order M_1")
    stop: int = Field(default=256, ge=1, description="Last spectral order M_max")
    step: int = Field(default=4, ge=1, description="Arithmetic schedule step")
    alpha: float = Field(default=1.0, ge=0.0, description="Symmetry penalty weight")
    beta: float = Field(default=1e-2, ge=0.0, description="Commutativity penalty weight")
    gamma: float = Field(default=1.0, ge=0.0, description="Cycle-consistency penalty weight")
    projection_steps: int = Field(default=10, ge=0, description="Gradient steps on the penalty per level")
    epsilon: float = Field(default=1e-8, ge=0.0, description="Ridge weight for the seed initialization")

    @model_validator(mode="after")
    def _ordered(self):
        if self.stop < self.start:
            raise ValueError("stop must be >= start")
        return self

    @property
    def schedule(self):
        orders = list(range(self.start, self.stop + 1, self.step))
        if orders[-1] != self.stop:
            orders.append(self.stop)
        return orders
