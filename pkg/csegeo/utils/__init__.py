"""
Initialization file for utils package.
"""

# Import utility components to make them available
from csegeo.utils.logger import get_logger, log_info, log_error, log_warning, log_debug
from csegeo.utils.errors import (
    CSEGeoError,
    UsageError,
    DataError,
    MeshFormatError,
    MeshValidationError,
    ParameterError,
    MismatchError,
    SpectralError,
    NumericalError,
    ContainerError,
)
