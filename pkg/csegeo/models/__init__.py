"""
Pydantic schemas for csegeo files, configs and reports.
"""

from csegeo.models.correspondence import CorrespondenceFile, PointMapFile
from csegeo.models.manifest import ContainerManifest
from csegeo.models.config import SyntheticConfig, FitConfig, TeacherConfig, FitRunConfig, ZoomOutConfig
from csegeo.models.reports import EvalReport, LevelStats, ZoomOutReport, FitReport
