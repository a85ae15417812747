"""
`csegeo softlabels`: precompute geodesic soft-label fields.
"""

import argparse

from csegeo.geodesics.soft_labels import KERNELS, soft_label_fields
from csegeo.mesh.parser import load_mesh
from csegeo.storage.artifacts import save_soft_labels
from csegeo.utils.settings import DEFAULT_SIGMA
from csegeo.cli.common import emit, int_list


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("softlabels", parents=[parent], help="Cache soft-label fields")
    parser.add_argument("--mesh", required=True, help="Input .obj or .ply mesh")
    parser.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="Kernel bandwidth")
    parser.add_argument("--vertices", default=None, help="Comma-separated centers (default: all vertices)")
    parser.add_argument("--kernel", choices=list(KERNELS), default="linear", help="Distance term in the exponent")
    parser.add_argument("--out", required=True, help="Output CSEB container")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    mesh = load_mesh(args.mesh)
    centers = int_list(args.vertices) if args.vertices else list(range(mesh.num_vertices))
    centers = sorted(set(centers))
    fields = soft_label_fields(mesh, centers, args.sigma, args.kernel)
    save_soft_labels(args.out, fields)
    report = {"mesh": mesh.mesh_id, "sigma": args.sigma, "kernel": args.kernel, "fields": len(fields)}
    emit(args, report, f"wrote {len(fields)} soft-label fields to {args.out}")
    return 0
