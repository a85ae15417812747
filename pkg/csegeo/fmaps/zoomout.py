"""
Constrained multi-scale refinement of functional maps.

Each schedule level re-encodes the current forward and backward point maps
at the new spectral order, then takes a few gradient steps on the
symmetry and cycle-consistency penalties before decoding again.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from csegeo.fmaps.functional_map import FunctionalMap, PointMap, cfrom_pointmap, pointmap_from_c, symmetry_operator
from csegeo.mesh.mesh import SymmetryMap
from csegeo.models.config import ZoomOutConfig
from csegeo.spectral.basis import SpectralBasis
from csegeo.utils.errors import MismatchError, NumericalError, ParameterError
from csegeo.utils.logger import log_debug, log_info

LevelCallback = Callable[[int, PointMap], None]


def penalty_value(C: np.ndarray, reverse: np.ndarray, alpha: float, gamma: float,
                  sym_src: Optional[np.ndarray] = None, sym_dst: Optional[np.ndarray] = None) -> float:
    """
    α‖Γ̂'C − CΓ̂‖² + γ‖CC' − I‖², each term divided by its entry count m².
    """
    m = C.shape[0]
    value = 0.0
    if sym_src is not None and alpha > 0:
        value += alpha * np.sum((sym_dst @ C - C @ sym_src) ** 2) / m ** 2
    if gamma > 0:
        value += gamma * np.sum((C @ reverse - np.eye(m)) ** 2) / m ** 2
    return float(value)


def project_penalties(C: np.ndarray, reverse: np.ndarray, alpha: float, gamma: float, steps: int,
                      sym_src: Optional[np.ndarray] = None, sym_dst: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Gradient steps with step 1/L on the penalty, with the reverse map held fixed.

    L bounds the Lipschitz constant of the gradient through spectral norms,
    so every step is nonincreasing in the penalty.

    Args:
        C: Square map being refined
        reverse: Opposite-direction map C'
        alpha: Symmetry weight
        gamma: Cycle-consistency weight
        steps: Number of gradient steps
        sym_src: Γ̂ on the map's source side (None skips the symmetry term)
        sym_dst: Γ̂' on the map's destination side

    Returns:
        Refined map
    """
    m = C.shape[0]
    use_symmetry = sym_src is not None and sym_dst is not None and alpha > 0
    lipschitz = 0.0
    if use_symmetry:
        lipschitz += 2.0 * alpha / m ** 2 * (np.linalg.norm(sym_dst, 2) + np.linalg.norm(sym_src, 2)) ** 2
    if gamma > 0:
        lipschitz += 2.0 * gamma / m ** 2 * np.linalg.norm(reverse, 2) ** 2
    if steps == 0 or lipschitz == 0.0:
        return C

    identity = np.eye(m)
    for _ in range(steps):
        gradient = np.zeros_like(C)
        if use_symmetry:
            residual = sym_dst @ C - C @ sym_src
            gradient += 2.0 * alpha / m ** 2 * (sym_dst.T @ residual - residual @ sym_src.T)
        if gamma > 0:
            gradient += 2.0 * gamma / m ** 2 * (C @ reverse - identity) @ reverse.T
        C = C - gradient / lipschitz
    return C


def _check_inputs(src: SpectralBasis, dst: SpectralBasis, initial: FunctionalMap, config: ZoomOutConfig) -> None:
    initial.check_bases(src, dst)
    available = min(src.num_eigen, dst.num_eigen)
    if config.stop > available:
        raise ParameterError(
            f"schedule reaches order {config.stop} but only {available} eigenpairs are available"
        )
    if initial.C.shape != (config.start, config.start):
        raise MismatchError(
            f"initial map has shape {initial.C.shape}, schedule starts at order {config.start}"
        )


def zoomout(src: SpectralBasis, dst: SpectralBasis, initial: FunctionalMap,
            config: Optional[ZoomOutConfig] = None,
            symmetry: Optional[Tuple[SymmetryMap, SymmetryMap]] = None,
            on_level: Optional[LevelCallback] = None) -> Tuple[FunctionalMap, PointMap]:
    """
    Refine a functional map along an increasing spectral schedule.

    The forward map (src -> dst) and the backward map (dst -> src, seeded with
    the transpose of the initial map) are re-encoded at every order; the
    forward map is then projected with the backward map fixed, and the
    backward map with the new forward map fixed.

    Args:
        src: Source basis with at least `config.stop` eigenpairs
        dst: Destination basis, area-normalized to the source
        initial: Initial map of order `config.start`
        config: Schedule and penalty weights
        symmetry: Optional (source, destination) symmetry maps
        on_level: Called with (order, decoded forward point map) after each level

    Returns:
        Tuple of final FunctionalMap and its decoded PointMap
    """
    config = config or ZoomOutConfig()
    _check_inputs(src, dst, initial, config)

    forward = initial
    backward = initial.transpose()
    forward_points = pointmap_from_c(src, dst, forward)
    backward_points = pointmap_from_c(dst, src, backward)

    for level, order in enumerate(config.schedule):
        src_m = src.truncate(order)
        dst_m = dst.truncate(order)

        forward = cfrom_pointmap(src_m, dst_m, forward_points, config.beta)
        backward = cfrom_pointmap(dst_m, src_m, backward_points, config.beta)

        sym_src = sym_dst = None
        if symmetry is not None:
            sym_src = symmetry_operator(src_m, symmetry[0])
            sym_dst = symmetry_operator(dst_m, symmetry[1])

        C = project_penalties(forward.C, backward.C, config.alpha, config.gamma,
                              config.projection_steps, sym_src, sym_dst)
        C_back = project_penalties(backward.C, C, config.alpha, config.gamma,
                                   config.projection_steps, sym_dst, sym_src)
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(C_back))):
            raise NumericalError(f"non-finite functional map at schedule level {level} (order {order})")

        forward = FunctionalMap(C=C, src_basis_id=src.basis_id, dst_basis_id=dst.basis_id)
        backward = FunctionalMap(C=C_back, src_basis_id=dst.basis_id, dst_basis_id=src.basis_id)
        forward_points = pointmap_from_c(src, dst, forward)
        backward_points = pointmap_from_c(dst, src, backward)

        penalty = penalty_value(C, C_back, config.alpha, config.gamma, sym_src, sym_dst)
        log_debug(f"Level {level}: order {order}, penalty {penalty:.3e}")
        if on_level is not None:
            on_level(order, forward_points)

    log_info(f"Refined functional map over {len(config.schedule)} levels up to order {config.schedule[-1]}")
    return forward, forward_points
