"""
Pydantic schemas for correspondence, symmetry and point-map JSON files.
"""

from typing import List, Tuple
from pydantic import BaseModel, Field


class CorrespondenceFile(BaseModel):
    """Schema for a CorrespondenceSet or SymmetryMap JSON file."""
    src_mesh: str = Field(..., description="Content hash of the source mesh")
    dst_mesh: str = Field(..., description="Content hash of the destination mesh")
    pairs: List[Tuple[int, int]] = Field(..., description="(src_vertex, dst_vertex) index pairs")


class PointMapFile(BaseModel):
    """Schema for a dense point map JSON file."""
    src_mesh: str = Field(..., description="Content hash of the mesh the indices refer to")
    dst_mesh: str = Field(..., description="Content hash of the mesh whose vertices are mapped")
    assignment: List[int] = Field(..., description="For each destination vertex, its source vertex")
