"""
`csegeo transfer`: move an embedding across meshes with a functional map.
"""

import argparse

from csegeo.embeddings.embedding import transfer
from csegeo.storage.artifacts import load_basis, load_embedding, load_functional_map, save_embedding
from csegeo.utils.errors import UsageError
from csegeo.cli.common import emit


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("transfer", parents=[parent], help="Transfer an embedding: E_hat' = C E_hat")
    parser.add_argument("--emb", required=True, help="Source embedding CSEB")
    parser.add_argument("--map", required=True, help="Functional map CSEB")
    parser.add_argument("--out", required=True, help="Output embedding CSEB")
    parser.add_argument("--verify", action="store_true", help="Check the per-vertex identity (needs both bases)")
    parser.add_argument("--src-basis", default=None, help="Source basis CSEB (with --verify)")
    parser.add_argument("--dst-basis", default=None, help="Destination basis CSEB (with --verify)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.verify and not (args.src_basis and args.dst_basis):
        raise UsageError("--verify needs --src-basis and --dst-basis")
    embedding = load_embedding(args.emb)
    fmap = load_functional_map(args.map)
    src = load_basis(args.src_basis) if args.verify else None
    dst = load_basis(args.dst_basis) if args.verify else None
    if dst is not None and src is not None:
        dst = dst.truncate(fmap.dst_order).with_total_area(src.total_area)
        src = src.truncate(fmap.src_order)
    moved = transfer(embedding, fmap, src, dst, verify=args.verify)
    save_embedding(args.out, moved)
    report = {
        "src_basis": embedding.basis_id,
        "dst_basis": moved.basis_id,
        "num_eigen": moved.num_eigen,
        "dim": moved.dim,
        "verified": bool(args.verify),
    }
    emit(args, report, f"wrote transferred {moved.num_eigen}x{moved.dim} embedding to {args.out}")
    return 0
