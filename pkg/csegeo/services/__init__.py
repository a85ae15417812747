"""
Initialization file for services package.
"""

# Import services to make them available
from csegeo.services.evaluation import Evaluator, evaluate, geodesic_errors, DEFAULT_THRESHOLDS
from csegeo.services.fitter import (
    EmbeddingFitter,
    make_teacher,
    make_synthetic,
    fit,
    joint_fit,
    fit_report,
)
from csegeo.services.correspondence import CorrespondenceService, ZoomOutResult, run_zoomout_pipeline
