"""Digital shearlet transforms with compactly supported generators in 2D and 3D."""

from .filters import (
    PROFILES,
    FanFilter,
    QmfPair,
    ScaleProfile,
    Taps,
    alpha_to_shear_levels,
    cascade,
    default_fan_filter,
    default_lowpass,
    default_qmf,
    mirror_highpass,
    orthonormality_defect,
)

__version__ = "0.1.0"
from .system2d import (
    ShearletSystem2D,
    build_isotropic_system_2d,
    build_system_2d,
    redundancy_2d,
)
from .system3d import ShearletSystem3D, build_system_3d, redundancy_3d
from .transform import CoefficientStack, forward, inverse, deserialize, serialize
from .apps import denoise, inpaint, separate, psnr
