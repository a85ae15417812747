"""
JSON persistence for seed correspondences and symmetry maps.
"""

import json

from pydantic import ValidationError

from csegeo.mesh.mesh import CorrespondenceSet, Mesh, SymmetryMap
from csegeo.models.correspondence import CorrespondenceFile
from csegeo.utils.errors import MeshFormatError, MismatchError


def _read_file(path: str) -> CorrespondenceFile:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return CorrespondenceFile.model_validate_json(f.read())
    except OSError as e:
        raise MeshFormatError(f"cannot read {path}: {e.strerror}")
    except ValidationError as e:
        raise MeshFormatError(f"invalid correspondence file {path}: {e.errors()[0]['msg']}")


def load_correspondences(path: str) -> CorrespondenceSet:
    """
    Load a CorrespondenceSet from JSON.

    Args:
        path: Path to a `{"src_mesh", "dst_mesh", "pairs"}` file

    Returns:
        CorrespondenceSet
    """
    record = _read_file(path)
    return CorrespondenceSet.from_pairs(record.pairs, record.src_mesh, record.dst_mesh)


def dump_correspondences(seeds: CorrespondenceSet) -> str:
    record = CorrespondenceFile(
        src_mesh=seeds.src_mesh_id,
        dst_mesh=seeds.dst_mesh_id,
        pairs=[(int(a), int(b)) for a, b in seeds.pairs],
    )
    return json.dumps(record.model_dump(), indent=2)


def load_symmetry(path: str, mesh: Mesh) -> SymmetryMap:
    """
    Load a SymmetryMap for `mesh` from JSON.

    Both mesh hashes in the file must equal the mesh's hash.
    """
    record = _read_file(path)
    if record.src_mesh != mesh.mesh_id or record.dst_mesh != mesh.mesh_id:
        raise MismatchError(f"symmetry file {path} was written for a different mesh")
    return SymmetryMap.from_pairs(record.pairs, mesh.num_vertices, mesh.mesh_id)


def dump_symmetry(symmetry: SymmetryMap) -> str:
    # Each pair once; fixed points are implicit
    pairs = [(int(k), int(p)) for k, p in enumerate(symmetry.pairing) if k < p]
    record = CorrespondenceFile(src_mesh=symmetry.mesh_id, dst_mesh=symmetry.mesh_id, pairs=pairs)
    return json.dumps(record.model_dump(), indent=2)
