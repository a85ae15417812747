"""
`csegeo eval`: geodesic error of predicted vertices against ground truth.
"""

import argparse

from csegeo.mesh.parser import load_mesh
from csegeo.services.evaluation import DEFAULT_THRESHOLDS, evaluate
from csegeo.storage.artifacts import load_vertex_list
from csegeo.cli.common import emit, float_list


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("eval", parents=[parent], help="Evaluate predicted correspondences")
    parser.add_argument("--mesh", required=True, help="Mesh normalized to the target diameter")
    parser.add_argument("--predicted", required=True, help="Predicted vertices (point map JSON or list)")
    parser.add_argument("--truth", required=True, help="True vertices (point map JSON or list)")
    parser.add_argument("--thresholds", default=",".join(str(t) for t in DEFAULT_THRESHOLDS),
                        help="Comma-separated accuracy thresholds")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    thresholds = float_list(args.thresholds)
    predicted = load_vertex_list(args.predicted)
    truth = load_vertex_list(args.truth)
    mesh = load_mesh(args.mesh)
    report = evaluate(mesh, predicted, truth, thresholds)
    accuracies = ", ".join(f"acc@{k}={v:.4f}" for k, v in report.accuracy_at.items())
    emit(args, report, f"mean geodesic error {report.mean_geodesic_error:.6g}; {accuracies}")
    return 0
