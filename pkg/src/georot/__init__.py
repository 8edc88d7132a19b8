"""Detection of outer rotations of 3D vector fields by iterative geometric correlation."""

from .corr import CorrelationResult, correlate_origin, correlate_projected
from .detect import DetectionResult, DetectorConfig, algorithm1, algorithm2, residual_error
from .field import (
    LinearField,
    RotationSpec,
    VectorField,
    apply_outer_rotation,
    coefficient_error,
    l2_norm_sq,
    random_linear_field,
    random_rotation,
    sample_linear,
)
from .ga3 import E12, E13, E23, Bivector3, Multivector3, Rotor3

__version__ = "0.1.0"


def __getattr__(name):
    # keep scikit-learn off the import path unless the estimator is used
    if name == "OuterRotationDetector":
        from .estimator import OuterRotationDetector

        return OuterRotationDetector
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
