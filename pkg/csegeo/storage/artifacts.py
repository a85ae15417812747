"""
Persistence of csegeo artifacts.

Tensors go into a CSEB container at `path`; metadata goes into the JSON
manifest `path + ".json"`. Point maps are plain JSON.
"""

import json
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from csegeo.embeddings.embedding import EmbeddingSet
from csegeo.fmaps.functional_map import FunctionalMap, PointMap
from csegeo.geodesics.soft_labels import SoftLabelField
from csegeo.models.correspondence import PointMapFile
from csegeo.models.manifest import ContainerManifest
from csegeo.spectral.basis import SpectralBasis
from csegeo.storage.container import read_container, write_container
from csegeo.utils.errors import ContainerError, MeshFormatError
from csegeo.utils.logger import log_info


def manifest_path(path: str) -> str:
    return f"{path}.json"


def write_manifest(path: str, manifest: ContainerManifest) -> None:
    try:
        with open(manifest_path(path), "w", encoding="utf-8") as f:
            f.write(manifest.model_dump_json(indent=2, exclude_none=True))
            f.write("\n")
    except OSError as e:
        raise ContainerError(f"cannot write manifest for {path}: {e.strerror}")


def read_manifest(path: str) -> ContainerManifest:
    try:
        with open(manifest_path(path), "r", encoding="utf-8") as f:
            return ContainerManifest.model_validate_json(f.read())
    except OSError as e:
        raise ContainerError(f"cannot read manifest for {path}: {e.strerror}")
    except ValidationError as e:
        raise ContainerError(f"invalid manifest for {path}: {e.errors()[0]['msg']}")


def _load(path: str, kind: str) -> Tuple[ContainerManifest, List[np.ndarray]]:
    manifest = read_manifest(path)
    if manifest.kind != kind:
        raise ContainerError(f"{path} holds a {manifest.kind}, expected a {kind}")
    if kind != "functional_map" and manifest.mesh_hash is None:
        raise ContainerError(f"{path} manifest does not name its mesh")
    tensors = read_container(path)
    if len(tensors) != len(manifest.tensors):
        raise ContainerError(
            f"{path} has {len(tensors)} tensors but its manifest lists {len(manifest.tensors)}"
        )
    return manifest, tensors


def save_basis(path: str, basis: SpectralBasis) -> None:
    """
    Save a SpectralBasis as [U, eigenvalues, mass].

    Args:
        path: Container path
        basis: Basis to store
    """
    write_container(path, [basis.U, basis.eigenvalues, basis.mass])
    write_manifest(path, ContainerManifest(
        kind="basis",
        tensors=["U", "eigenvalues", "mass"],
        mesh_hash=basis.mesh_id,
        num_eigen=basis.num_eigen,
        eigenvalues=[float(v) for v in basis.eigenvalues],
    ))
    log_info(f"Saved basis of order {basis.num_eigen} to {path}")


def load_basis(path: str) -> SpectralBasis:
    manifest, (U, eigenvalues, mass) = _load(path, "basis")
    if U.ndim != 2 or eigenvalues.shape != (U.shape[1],) or mass.shape != (U.shape[0],):
        raise ContainerError(f"{path} holds inconsistent basis tensor shapes")
    return SpectralBasis(U=U, eigenvalues=eigenvalues, mass=mass, mesh_id=manifest.mesh_hash)


def save_embedding(path: str, embedding: EmbeddingSet) -> None:
    write_container(path, [embedding.E_hat])
    write_manifest(path, ContainerManifest(
        kind="embedding",
        tensors=["E_hat"],
        mesh_hash=embedding.basis_id,
        num_eigen=embedding.num_eigen,
        dim=embedding.dim,
    ))
    log_info(f"Saved {embedding.num_eigen}x{embedding.dim} embedding to {path}")


def load_embedding(path: str) -> EmbeddingSet:
    manifest, (E_hat,) = _load(path, "embedding")
    if E_hat.ndim != 2:
        raise ContainerError(f"{path} does not hold an embedding matrix")
    return EmbeddingSet(E_hat=E_hat, basis_id=manifest.mesh_hash)


def save_functional_map(path: str, fmap: FunctionalMap) -> None:
    write_container(path, [fmap.C])
    write_manifest(path, ContainerManifest(
        kind="functional_map",
        tensors=["C"],
        src_mesh=fmap.src_basis_id,
        dst_mesh=fmap.dst_basis_id,
        num_eigen=fmap.src_order,
    ))
    log_info(f"Saved {fmap.dst_order}x{fmap.src_order} functional map to {path}")


def load_functional_map(path: str) -> FunctionalMap:
    manifest, (C,) = _load(path, "functional_map")
    if C.ndim != 2 or manifest.src_mesh is None or manifest.dst_mesh is None:
        raise ContainerError(f"{path} does not hold a bound functional map")
    return FunctionalMap(C=C, src_basis_id=manifest.src_mesh, dst_basis_id=manifest.dst_mesh)


def save_soft_labels(path: str, fields: Sequence[SoftLabelField]) -> None:
    """
    Save soft-label fields of one (mesh, sigma, kernel) as a centers x K matrix.
    """
    if not fields:
        raise ContainerError("no soft-label fields to save")
    keys = {(f.mesh_id, f.sigma, f.kernel) for f in fields}
    if len(keys) != 1:
        raise ContainerError("soft-label fields must share mesh, sigma and kernel")
    fields = sorted(fields, key=lambda f: f.center)
    first = fields[0]
    write_container(path, [np.vstack([f.weights for f in fields])])
    write_manifest(path, ContainerManifest(
        kind="soft_labels",
        tensors=["weights"],
        mesh_hash=first.mesh_id,
        sigma=first.sigma,
        kernel=first.kernel,
        vertices=[f.center for f in fields],
    ))
    log_info(f"Saved {len(fields)} soft-label fields to {path}")


def load_soft_labels(path: str) -> List[SoftLabelField]:
    manifest, (weights,) = _load(path, "soft_labels")
    centers = manifest.vertices or []
    if weights.ndim != 2 or weights.shape[0] != len(centers) or manifest.sigma is None:
        raise ContainerError(f"{path} holds inconsistent soft-label data")
    kernel = manifest.kernel or "linear"
    return [
        SoftLabelField(center=center, sigma=manifest.sigma, weights=row, mesh_id=manifest.mesh_hash, kernel=kernel)
        for center, row in zip(centers, weights)
    ]


def dump_pointmap(pointmap: PointMap) -> str:
    record = PointMapFile(
        src_mesh=pointmap.src_mesh_id,
        dst_mesh=pointmap.dst_mesh_id,
        assignment=[int(k) for k in pointmap.assignment],
    )
    return record.model_dump_json(indent=2)


def save_pointmap(path: str, pointmap: PointMap) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(dump_pointmap(pointmap))
            f.write("\n")
    except OSError as e:
        raise ContainerError(f"cannot write {path}: {e.strerror}")


def load_pointmap(path: str) -> PointMap:
    try:
        with open(path, "r", encoding="utf-8") as f:
            record = PointMapFile.model_validate_json(f.read())
    except OSError as e:
        raise MeshFormatError(f"cannot read {path}: {e.strerror}")
    except ValidationError as e:
        raise MeshFormatError(f"invalid point map file {path}: {e.errors()[0]['msg']}")
    return PointMap.from_assignment(record.assignment, record.src_mesh, record.dst_mesh)


def load_vertex_list(path: str) -> List[int]:
    """
    Read vertex indices from a point map JSON or a bare JSON list.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as e:
        raise MeshFormatError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise MeshFormatError(f"{path} is not valid JSON: {e.msg}", e.lineno)

    if isinstance(payload, dict):
        try:
            payload = PointMapFile.model_validate(payload).assignment
        except ValidationError as e:
            raise MeshFormatError(f"invalid point map file {path}: {e.errors()[0]['msg']}")
    if not isinstance(payload, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in payload):
        raise MeshFormatError(f"{path} must hold a list of vertex indices")
    return payload
