"""
Initialization file for storage package.
"""

# Import storage components to make them available
from csegeo.storage.container import encode_container, decode_container, write_container, read_container
from csegeo.storage.artifacts import (
    save_basis,
    load_basis,
    save_embedding,
    load_embedding,
    save_functional_map,
    load_functional_map,
    save_soft_labels,
    load_soft_labels,
    save_pointmap,
    load_pointmap,
    dump_pointmap,
    load_vertex_list,
    read_manifest,
)
