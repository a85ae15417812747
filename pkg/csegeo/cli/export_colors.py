"""
`csegeo export-colors`: color mesh vertices by their embedding.
"""

import argparse

from csegeo.embeddings.embedding import embedding_colors, expand
from csegeo.mesh.export import export_vertex_colors
from csegeo.mesh.parser import load_mesh
from csegeo.storage.artifacts import load_basis, load_embedding
from csegeo.utils.errors import ContainerError
from csegeo.cli.common import check_bound, emit


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("export-colors", parents=[parent], help="Write a PLY colored by embedding PCA")
    parser.add_argument("--mesh", required=True, help="Mesh the basis was computed on")
    parser.add_argument("--basis", required=True, help="Basis CSEB")
    parser.add_argument("--emb", required=True, help="Embedding CSEB")
    parser.add_argument("--out", required=True, help="Output .ply")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    mesh = load_mesh(args.mesh)
    basis = load_basis(args.basis)
    check_bound(basis.mesh_id, mesh, "basis")
    embedding = load_embedding(args.emb)
    basis = basis.truncate(min(basis.num_eigen, embedding.num_eigen))
    colors = embedding_colors(expand(embedding, basis))
    data = export_vertex_colors(mesh, colors)
    try:
        with open(args.out, "wb") as f:
            f.write(data)
    except OSError as e:
        raise ContainerError(f"cannot write {args.out}: {e.strerror}")
    emit(args, {"mesh": mesh.mesh_id, "vertices": mesh.num_vertices}, f"wrote colored mesh to {args.out}")
    return 0
