"""Two-dimensional digital shearlet systems.

For every scale ``j = j0, ..., J - 1`` (``J = j0 + n_scales``) and shear
``|k| <= 2**d_j`` the horizontal-cone filter is::

    psi_{j,k} = S^{d_j}_{k / 2**d_j}(p_j * W_j),
    W_j       = g_{J-j} (axis 0)  x  h_{J-j+d_j} (axis 1),

where ``p_j`` is the fan filter, normalized to unit l1 norm and upsampled by
``2**(d_j + 1)`` along axis 1.  Vertical-cone filters are transposes.  The
lowpass is ``h_n x h_n`` with ``n = n_scales``.  The vertical-cone filters with
``|k| = 2**d_j`` nearly duplicate their horizontal partners and are left out
unless ``full_system`` is set.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np
from scipy import fft

from ._system import ShearletSystemBase
from .errors import DomainError, UnsupportedSizeError
from .filters import (
    FanFilter,
    QmfPair,
    ScaleProfile,
    Taps,
    cascade,
    default_fan_filter,
    default_qmf,
)
from .shear import shear_taps

__all__ = [
    "LOWPASS",
    "HORIZONTAL",
    "VERTICAL",
    "FilterIndex2D",
    "ShearletSystem2D",
    "build_wavelet_tensor",
    "directional_component",
    "shearlet_taps_2d",
    "build_shearlet_filter",
    "build_system_2d",
    "build_isotropic_system_2d",
    "redundancy_2d",
    "lowpass_taps",
    "MIN_GRID",
]

LOWPASS = "lowpass"
HORIZONTAL = "cone_horizontal"
VERTICAL = "cone_vertical"
MIN_GRID = 8


class FilterIndex2D(NamedTuple):
    """Position of a filter in a 2D system; ``scale`` and ``shear`` are ``None`` for the lowpass."""

    kind: str
    scale: int | None = None
    shear: int | None = None


def _as_profile(profile) -> ScaleProfile:
    return profile if isinstance(profile, ScaleProfile) else ScaleProfile(tuple(profile))


def _outer(a: Taps, b: Taps) -> Taps:
    return Taps(np.outer(a.coeffs, b.coeffs), (a.origin[0], b.origin[0]))


def build_wavelet_tensor(j: int, d_j: int, J: int, qmf: QmfPair | None = None) -> Taps:
    """``W_j = g_{J-j} x h_{J-j+d_j}``: highpass along axis 0, lowpass along axis 1.

    Raises
    ------
    DomainError
        If a cascade level would be negative or zero for the highpass.
    """
    qmf = qmf or default_qmf()
    if J - j < 1:
        raise DomainError(f"highpass cascade level J - j = {J - j} must be positive")
    if d_j < 0:
        raise DomainError("shear level must be nonnegative")
    g = cascade(qmf, J - j).highpass
    h = cascade(qmf, J - j + d_j).lowpass
    return _outer(g, h)


def directional_component(
    fan: FanFilter, j: int, d_j: int, J: int, literal_fan_dilation: bool = False
) -> Taps:
    """Fan filter ``p_j`` used at scale ``j``, normalized to unit l1 norm.

    By default the fan is upsampled by ``2**(d_j + 1)`` along axis 1 only.  With
    ``literal_fan_dilation`` it is additionally dilated by ``2**(J - j - 1)``
    along axis 0 and by ``2**(J - j + d_j)`` along axis 1.
    """
    p = fan.taps
    p = Taps(p.coeffs / np.abs(p.coeffs).sum(), p.origin)
    if literal_fan_dilation:
        return p.upsample((2 ** (J - j - 1), 2 ** (J - j + d_j)))
    return p.upsample((1, 2 ** (d_j + 1)))


def lowpass_taps(n_levels: int, qmf: QmfPair | None = None, ndim: int = 2) -> Taps:
    """Separable lowpass ``h_n x ... x h_n``."""
    h = cascade(qmf or default_qmf(), n_levels).lowpass
    out = h
    for _ in range(ndim - 1):
        c = np.multiply.outer(out.coeffs, h.coeffs)
        out = Taps(c, out.origin + h.origin)
    return out


def redundancy_2d(profile, full_system: bool = False) -> int:
    """Number of filters of a 2D system, lowpass included."""
    levels = _as_profile(profile).shear_levels
    if full_system:
        return 1 + sum(2 * (2 * 2**d + 1) for d in levels)
    return 1 + sum(2 ** (d + 2) for d in levels)


def _index_list(profile: ScaleProfile, full_system: bool):
    out = [FilterIndex2D(LOWPASS)]
    for j, d in profile.scales():
        K = 2**d
        out += [FilterIndex2D(HORIZONTAL, j, k) for k in range(-K, K + 1)]
        out += [
            FilterIndex2D(VERTICAL, j, k)
            for k in range(-K, K + 1)
            if full_system or abs(k) < K
        ]
    return out


class _TapsBuilder:
    """Spatial taps of a system's filters, with the unsheared base cached per scale."""

    def __init__(self, profile, fan, qmf, literal_fan_dilation):
        self.profile = profile
        self.fan = fan
        self.qmf = qmf
        self.literal = literal_fan_dilation
        self.levels = dict(profile.scales())
        self._base = {}

    def base(self, j: int) -> Taps:
        if j not in self._base:
            d, J = self.levels[j], self.profile.finest
            p = directional_component(self.fan, j, d, J, self.literal)
            self._base[j] = p.convolve(build_wavelet_tensor(j, d, J, self.qmf))
        return self._base[j]

    def __call__(self, index: FilterIndex2D) -> Taps:
        if index.kind == LOWPASS:
            return lowpass_taps(self.profile.n_scales, self.qmf)
        d = self.levels[index.scale]
        h = cascade(self.qmf, d).lowpass
        t = shear_taps(self.base(index.scale), index.shear, d, h, sheared_axis=0, shear_axis=1)
        if index.kind == VERTICAL:
            t = Taps(t.coeffs.T, t.origin[::-1])
        return t


def shearlet_taps_2d(
    j: int,
    k: int,
    cone: str,
    profile,
    fan: FanFilter | None = None,
    qmf: QmfPair | None = None,
    literal_fan_dilation: bool = False,
) -> Taps:
    """Spatial taps of the cone filter at scale ``j`` and shear ``k``."""
    profile = _as_profile(profile)
    levels = dict(profile.scales())
    if j not in levels:
        raise DomainError(f"scale {j} is not part of the profile")
    if abs(k) > 2 ** levels[j]:
        raise DomainError(f"|k| = {abs(k)} exceeds 2**d_j = {2 ** levels[j]}")
    if cone not in (HORIZONTAL, VERTICAL):
        raise DomainError(f"unknown cone {cone!r}")
    builder = _TapsBuilder(profile, fan or default_fan_filter(), qmf or default_qmf(), literal_fan_dilation)
    return builder(FilterIndex2D(cone, j, k))


def _check_shape(shape, ndim):
    shape = tuple(int(s) for s in shape)
    if len(shape) != ndim:
        raise DomainError(f"expected {ndim} grid dimensions, got {len(shape)}")
    if min(shape) < MIN_GRID:
        raise UnsupportedSizeError(f"grid {shape} is smaller than {MIN_GRID} along some axis")
    return shape


def build_shearlet_filter(
    j: int,
    k: int,
    cone: str,
    profile,
    fan: FanFilter | None = None,
    qmf: QmfPair | None = None,
    shape=(512, 512),
) -> np.ndarray:
    """Full complex spectrum of one cone filter on a grid of the given shape."""
    shape = _check_shape(shape, 2)
    taps = shearlet_taps_2d(j, k, cone, profile, fan, qmf)
    return fft.fft2(taps.periodize(shape))


class ShearletSystem2D(ShearletSystemBase):
    """A built 2D system; see :func:`build_system_2d`.

    Attributes
    ----------
    profile : ScaleProfile
    full_system : bool
    fan : FanFilter
    qmf : QmfPair
    """

    def __init__(self, shape, profile, fan, qmf, full_system, indices, spectra, builder):
        self.profile = profile
        self.fan = fan
        self.qmf = qmf
        self.full_system = full_system
        super().__init__(shape, indices, spectra, builder)

    @property
    def height(self) -> int:
        return self.shape[0]

    @property
    def width(self) -> int:
        return self.shape[1]

    def scale_of(self, i: int):
        return self.indices[i].scale

    def __repr__(self):
        return (
            f"ShearletSystem2D(shape={self.shape}, shear_levels={self.profile.shear_levels}, "
            f"j0={self.profile.j0}, full_system={self.full_system}, filters={len(self)})"
        )


def build_system_2d(
    shape,
    profile,
    fan: FanFilter | None = None,
    qmf: QmfPair | None = None,
    full_system: bool = False,
    *,
    literal_fan_dilation: bool = False,
    workers: int | None = None,
) -> ShearletSystem2D:
    """Build every filter of a 2D digital shearlet system on a periodic grid.

    Parameters
    ----------
    shape : (int, int)
        Grid size, at least 8 along each axis.
    profile : ScaleProfile or sequence of int
        Shear levels per scale (coarse to fine) and the coarsest scale offset.
    fan : FanFilter, optional
        Directional filter; the shipped maximally flat fan by default.
    qmf : QmfPair, optional
        Wavelet filters; the 9-tap maximally flat pair by default.
    full_system : bool
        Keep the vertical-cone boundary filters.
    literal_fan_dilation : bool
        Dilate the fan filter per scale as well (see :func:`directional_component`).
    workers : int, optional
        Threads used to build filters in parallel.

    Returns
    -------
    ShearletSystem2D

    Raises
    ------
    UnsupportedSizeError
        If the grid is smaller than 8 along some axis.
    SingularFrameError
        If the frame weight vanishes somewhere.

    Examples
    --------
    >>> sys = build_system_2d((64, 64), [0, 0, 1, 1])
    >>> len(sys)
    25
    """
    shape = _check_shape(shape, 2)
    profile = _as_profile(profile)
    fan = fan or default_fan_filter()
    qmf = qmf or default_qmf()
    builder = _TapsBuilder(profile, fan, qmf, literal_fan_dilation)
    indices = _index_list(profile, full_system)
    spectra = np.empty((len(indices), shape[0], shape[1] // 2 + 1), dtype=complex)
    for j, _ in profile.scales():
        builder.base(j)

    horizontal = {}

    def fill(i):
        idx = indices[i]
        if idx.kind == VERTICAL and (idx.scale, idx.shear) in horizontal:
            # the transpose of a horizontal filter; reuse its taps
            t = horizontal[(idx.scale, idx.shear)]
            t = Taps(t.coeffs.T, t.origin[::-1])
        else:
            t = builder(idx)
        spectra[i] = fft.rfft2(t.periodize(shape))
        return t

    first = [i for i, idx in enumerate(indices) if idx.kind != VERTICAL]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i, t in zip(first, pool.map(fill, first)):
            if indices[i].kind == HORIZONTAL:
                horizontal[(indices[i].scale, indices[i].shear)] = t
        rest = [i for i, idx in enumerate(indices) if idx.kind == VERTICAL]
        list(pool.map(fill, rest))
    return ShearletSystem2D(shape, profile, fan, qmf, full_system, indices, spectra, builder)


def build_isotropic_system_2d(
    shape, n_scales: int, qmf: QmfPair | None = None, j0: int = 0, *, workers=None
) -> ShearletSystem2D:
    """Undecimated separable wavelet system: all ``d_j = 0`` and an impulse fan filter."""
    profile = ScaleProfile((0,) * int(n_scales), j0)
    return build_system_2d(shape, profile, FanFilter.impulse(), qmf, workers=workers)
