"""
Pydantic schema for the JSON manifest stored next to every CSEB container.
"""

from typing import List, Literal, Optional
from pydantic import BaseModel, Field


class ContainerManifest(BaseModel):
    """Schema for a CSEB manifest."""
    kind: Literal["basis", "embedding", "functional_map", "soft_labels"] = Field(..., description="Artifact kind")
    version: int = Field(default=1, description="Container format version")
    tensors: List[str] = Field(..., description="Names of the stored tensors, in container order")
    mesh_hash: Optional[str] = Field(default=None, description="Mesh the artifact is bound to")
    src_mesh: Optional[str] = Field(default=None, description="Source basis mesh of a functional map")
    dst_mesh: Optional[str] = Field(default=None, description="Destination basis mesh of a functional map")
    num_eigen: Optional[int] = Field(default=None, description="Spectral truncation M")
    dim: Optional[int] = Field(default=None, description="Embedding dimension D")
    eigenvalues: Optional[List[float]] = Field(default=None, description="Eigenvalues of a basis")
    sigma: Optional[float] = Field(default=None, description="Soft-label bandwidth")
    kernel: Optional[str] = Field(default=None, description="Soft-label kernel (linear, squared)")
    vertices: Optional[List[int]] = Field(default=None, description="Centers of cached soft-label fields")
