"""
CSEB binary tensor container.

Layout: magic "CSEB", u32 version, u32 tensor count, then per tensor a u8
rank, `rank` u64 dimensions and a little-endian f64 row-major payload.
"""

import struct
from typing import List, Sequence

import numpy as np

from csegeo.utils.errors import ContainerError

MAGIC = b"CSEB"
VERSION = 1

HEADER_STRUCT = struct.Struct("<4s I I")
RANK_STRUCT = struct.Struct("<B")
DIM_STRUCT = struct.Struct("<Q")


def encode_container(tensors: Sequence[np.ndarray]) -> bytes:
    """
    Serialize tensors into CSEB bytes.

    Args:
        tensors: Arrays to store, in order

    Returns:
        Container bytes
    """
    chunks = [HEADER_STRUCT.pack(MAGIC, VERSION, len(tensors))]
    for tensor in tensors:
        array = np.asarray(tensor, dtype="<f8")
        if array.ndim > 255:
            raise ContainerError(f"tensor rank {array.ndim} does not fit in a u8")
        chunks.append(RANK_STRUCT.pack(array.ndim))
        chunks.extend(DIM_STRUCT.pack(dim) for dim in array.shape)
        chunks.append(np.ascontiguousarray(array).tobytes(order="C"))
    return b"".join(chunks)


def decode_container(data: bytes) -> List[np.ndarray]:
    """
    Parse CSEB bytes back into float64 arrays.

    Args:
        data: Container bytes

    Returns:
        List of arrays in stored order
    """
    if len(data) < HEADER_STRUCT.size:
        raise ContainerError("container is shorter than its header")
    magic, version, count = HEADER_STRUCT.unpack_from(data, 0)
    if magic != MAGIC:
        raise ContainerError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")

    offset = HEADER_STRUCT.size
    tensors = []
    for index in range(count):
        try:
            (rank,) = RANK_STRUCT.unpack_from(data, offset)
            offset += RANK_STRUCT.size
            shape = []
            for _ in range(rank):
                (dim,) = DIM_STRUCT.unpack_from(data, offset)
                offset += DIM_STRUCT.size
                shape.append(dim)
        except struct.error:
            raise ContainerError(f"truncated header of tensor {index}")
        size = int(np.prod(shape, dtype=np.int64)) if shape else 1
        end = offset + 8 * size
        if end > len(data):
            raise ContainerError(f"truncated payload of tensor {index}")
        array = np.frombuffer(data, dtype="<f8", count=size, offset=offset).reshape(shape)
        tensors.append(array.astype(np.float64))
        offset = end
    if offset != len(data):
        raise ContainerError(f"{len(data) - offset} trailing bytes after the last tensor")
    return tensors


def write_container(path: str, tensors: Sequence[np.ndarray]) -> None:
    try:
        with open(path, "wb") as f:
            f.write(encode_container(tensors))
    except OSError as e:
        raise ContainerError(f"cannot write {path}: {e.strerror}")


def read_container(path: str) -> List[np.ndarray]:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise ContainerError(f"cannot read {path}: {e.strerror}")
    return decode_container(data)
