"""
Initialization file for mesh package.
"""

# Import mesh components to make them available
from csegeo.mesh.mesh import Mesh, SymmetryMap, CorrespondenceSet, face_geometry
from csegeo.mesh.parser import parse_obj, parse_ply_ascii, load_mesh
from csegeo.mesh.export import export_vertex_colors, export_ply, write_obj, write_mesh
from csegeo.mesh.normalize import normalize_mesh, normalize_area
from csegeo.mesh.annotations import load_correspondences, dump_correspondences, load_symmetry, dump_symmetry
