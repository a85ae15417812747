"""
End-to-end correspondence pipeline: bases, seed initialization, refinement.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from csegeo.fmaps.functional_map import FunctionalMap, PointMap, recovery_rate, seed_cinit
from csegeo.fmaps.zoomout import zoomout
from csegeo.mesh.mesh import CorrespondenceSet, Mesh, SymmetryMap
from csegeo.mesh.normalize import normalize_mesh
from csegeo.models.config import ZoomOutConfig
from csegeo.models.reports import LevelStats, ZoomOutReport
from csegeo.services.evaluation import Evaluator
from csegeo.spectral.basis import SpectralBasis, eigenbasis
from csegeo.spectral.operators import build_operators
from csegeo.utils.errors import MismatchError, ParameterError
from csegeo.utils.logger import log_info


@dataclass(frozen=True, eq=False)
class ZoomOutResult:
    """Outputs of one pipeline run."""

    fmap: FunctionalMap
    pointmap: PointMap
    report: ZoomOutReport
    src_basis: SpectralBasis
    dst_basis: SpectralBasis


class CorrespondenceService:
    """
    Correspondence pipeline between a source and a destination mesh.
    """

    def __init__(self, src_mesh: Mesh, dst_mesh: Mesh, config: Optional[ZoomOutConfig] = None,
                 src_basis: Optional[SpectralBasis] = None, dst_basis: Optional[SpectralBasis] = None):
        """
        Initialize the service, computing any basis not supplied.

        The destination basis is rescaled to the source's total area.

        Args:
            src_mesh: Source mesh
            dst_mesh: Destination mesh
            config: Schedule and penalty weights
            src_basis: Precomputed source basis
            dst_basis: Precomputed destination basis
        """
        self.config = config or ZoomOutConfig()
        self.src_mesh = src_mesh
        self.dst_mesh = dst_mesh
        self.src_basis = self._basis(src_mesh, src_basis)
        raw_dst = self._basis(dst_mesh, dst_basis)
        self.dst_basis = raw_dst.with_total_area(self.src_basis.total_area)

    def _basis(self, mesh: Mesh, basis: Optional[SpectralBasis]) -> SpectralBasis:
        order = self.config.stop
        if basis is None:
            return eigenbasis(build_operators(mesh), order)
        if basis.mesh_id != mesh.mesh_id:
            raise MismatchError("supplied basis was computed on a different mesh")
        if basis.num_eigen < order:
            raise ParameterError(f"supplied basis has {basis.num_eigen} eigenpairs, schedule needs {order}")
        return basis.truncate(order)

    def run(self, seeds: CorrespondenceSet, symmetry: Optional[Sequence[SymmetryMap]] = None,
            truth: Optional[Sequence[int]] = None) -> ZoomOutResult:
        """
        Initialize from seeds and refine along the schedule.

        Args:
            seeds: Seed correspondences (src_vertex, dst_vertex)
            symmetry: Optional (source, destination) symmetry maps
            truth: Optional true source vertex for every destination vertex

        Returns:
            ZoomOutResult
        """
        config = self.config
        if symmetry is not None:
            if len(symmetry) != 2:
                raise ParameterError("symmetry needs one map per mesh")
            symmetry[0].check_mesh(self.src_mesh)
            symmetry[1].check_mesh(self.dst_mesh)
            symmetry = (symmetry[0], symmetry[1])
        if truth is not None:
            truth = np.asarray(truth, dtype=np.int64)
            if truth.shape[0] != self.dst_mesh.num_vertices:
                raise MismatchError(
                    f"ground truth has {truth.shape[0]} entries, destination has {self.dst_mesh.num_vertices} vertices"
                )

        initial = seed_cinit(self.src_basis, self.dst_basis, seeds, config.start, config.beta, config.epsilon)

        levels: List[LevelStats] = []

        def record(order: int, pointmap: PointMap) -> None:
            recovery = recovery_rate(pointmap, truth) if truth is not None else None
            levels.append(LevelStats(order=order, recovery=recovery))
            log_info(f"Level order {order}" + (f": recovery {recovery:.4f}" if recovery is not None else ""))

        fmap, pointmap = zoomout(self.src_basis, self.dst_basis, initial, config, symmetry, record)

        report = ZoomOutReport(
            src_mesh=self.src_mesh.mesh_id,
            dst_mesh=self.dst_mesh.mesh_id,
            seeds=seeds.size,
            schedule=config.schedule,
            levels=levels,
        )
        if truth is not None:
            report.final_recovery = recovery_rate(pointmap, truth)
            normalized, _ = normalize_mesh(self.src_mesh)
            report.evaluation = Evaluator(normalized, check_normalized=False).evaluate(pointmap.assignment, truth)
        return ZoomOutResult(fmap=fmap, pointmap=pointmap, report=report,
                             src_basis=self.src_basis, dst_basis=self.dst_basis)


def run_zoomout_pipeline(src_mesh: Mesh, dst_mesh: Mesh, seeds: CorrespondenceSet,
                         config: Optional[ZoomOutConfig] = None,
                         symmetry: Optional[Sequence[SymmetryMap]] = None,
                         truth: Optional[Sequence[int]] = None) -> ZoomOutResult:
    """Build both bases and run the correspondence pipeline once."""
    return CorrespondenceService(src_mesh, dst_mesh, config).run(seeds, symmetry, truth)
