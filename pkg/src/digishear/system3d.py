"""Three-dimensional digital shearlet systems.

The frequency domain splits into three pyramids, one around each axis.  In
pyramid coordinates ``(a, b, c)`` (principal axis ``a``) a filter is::

    psi_hat(xi) = g_hat_{J-j}(xi_a) * Phi_hat_{k1}(xi_a, xi_b) * Phi_hat_{k2}(xi_a, xi_c),
    Phi_{j,k}   = S^{d_j}_{k / 2**d_j}(p_j * (delta x h_{J-j+d_j})),

i.e. the 2D construction with the highpass factor removed, applied on the
two coordinate planes that contain the principal axis.  The pyramids use
``(a, b, c) = (0, 1, 2), (1, 0, 2), (2, 0, 1)``.

Filters on a seam between two pyramids are nearly duplicated; with omission
on, pyramid 1 keeps all shears, pyramid 2 drops ``|k1| = 2**d_j`` (its seam
with pyramid 1) and pyramid 3 drops both ``|k1| = 2**d_j`` and
``|k2| = 2**d_j``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np
from scipy import fft
from scipy import signal as sps

from ._system import ShearletSystemBase, hermitian_expand
from .errors import DomainError
from .filters import FanFilter, QmfPair, ScaleProfile, Taps, cascade, default_fan_filter, default_qmf
from .shear import shear_taps
from .system2d import _as_profile, _check_shape, directional_component, lowpass_taps

__all__ = [
    "LOWPASS",
    "PYRAMIDS",
    "PYRAMID_AXES",
    "FilterIndex3D",
    "ShearletSystem3D",
    "build_phi_component",
    "shearlet_taps_3d",
    "build_shearlet_filter_3d",
    "build_system_3d",
    "redundancy_3d",
]

LOWPASS = "lowpass"
PYRAMIDS = ("pyramid_1", "pyramid_2", "pyramid_3")
PYRAMID_AXES = {"pyramid_1": (0, 1, 2), "pyramid_2": (1, 0, 2), "pyramid_3": (2, 0, 1)}


class FilterIndex3D(NamedTuple):
    """Position of a filter in a 3D system; ``shears`` is ``(k1, k2)``."""

    kind: str
    scale: int | None = None
    shears: tuple | None = None


def redundancy_3d(profile, full_system: bool = False) -> int:
    """Number of filters of a 3D system, lowpass included."""
    levels = _as_profile(profile).shear_levels
    total = 1
    for d in levels:
        n = 2 * 2**d + 1
        total += 3 * n * n if full_system else 3 * n * n - 6 * n + 4
    return total


def _keep(pyramid: str, k1: int, k2: int, K: int, full_system: bool) -> bool:
    if full_system or pyramid == "pyramid_1":
        return True
    if pyramid == "pyramid_2":
        return abs(k1) < K
    return abs(k1) < K and abs(k2) < K


def _index_list(profile: ScaleProfile, full_system: bool):
    out = [FilterIndex3D(LOWPASS)]
    for j, d in profile.scales():
        K = 2**d
        for pyr in PYRAMIDS:
            out += [
                FilterIndex3D(pyr, j, (k1, k2))
                for k1 in range(-K, K + 1)
                for k2 in range(-K, K + 1)
                if _keep(pyr, k1, k2, K, full_system)
            ]
    return out


def build_phi_component(
    j: int,
    k: int,
    d_j: int,
    profile,
    fan: FanFilter | None = None,
    qmf: QmfPair | None = None,
) -> Taps:
    """2D taps ``S^{d_j}(p_j * (delta x h_{J-j+d_j}))`` on a pyramid plane.

    Axis 0 is the pyramid's principal axis, axis 1 the sheared-toward axis.
    """
    profile = _as_profile(profile)
    if abs(k) > 2**d_j:
        raise DomainError(f"|k| = {abs(k)} exceeds 2**d_j = {2**d_j}")
    fan = fan or default_fan_filter()
    qmf = qmf or default_qmf()
    J = profile.finest
    if J - j + d_j < 0:
        raise DomainError("cascade level must be nonnegative")
    h = cascade(qmf, J - j + d_j).lowpass
    p = directional_component(fan, j, d_j, J)
    base = p.convolve(Taps(h.coeffs[None, :], (0, h.origin[0])))
    return shear_taps(base, k, d_j, cascade(qmf, d_j).lowpass, sheared_axis=0, shear_axis=1)


class _Components:
    """Cached 1D highpass and 2D Phi components of a 3D system."""

    def __init__(self, profile, fan, qmf):
        self.profile = profile
        self.fan = fan
        self.qmf = qmf
        self.levels = dict(profile.scales())
        self._phi = {}

    def highpass(self, j: int) -> Taps:
        return cascade(self.qmf, self.profile.finest - j).highpass

    def phi(self, j: int, k: int) -> Taps:
        key = (j, k)
        if key not in self._phi:
            self._phi[key] = build_phi_component(j, k, self.levels[j], self.profile, self.fan, self.qmf)
        return self._phi[key]

    def warm(self):
        for j, d in self.profile.scales():
            for k in range(-(2**d), 2**d + 1):
                self.phi(j, k)

    def taps(self, index: FilterIndex3D) -> Taps:
        if index.kind == LOWPASS:
            return lowpass_taps(self.profile.n_scales, self.qmf, ndim=3)
        j, (k1, k2) = index.scale, index.shears
        g = self.highpass(j)
        p1, p2 = self.phi(j, k1), self.phi(j, k2)
        t = sps.convolve(g.coeffs[:, None, None], p1.coeffs[:, :, None])
        t = sps.convolve(t, p2.coeffs[:, None, :])
        origin = (g.origin[0] + p1.origin[0] + p2.origin[0], p1.origin[1], p2.origin[1])
        a, b, c = PYRAMID_AXES[index.kind]
        order = np.argsort((a, b, c))  # pyramid axis that lands on each array axis
        return Taps(np.transpose(t, order), tuple(origin[o] for o in order))

    def half_spectrum(self, index: FilterIndex3D, shape) -> np.ndarray:
        if index.kind == LOWPASS:
            return fft.rfftn(self.taps(index).periodize(shape))
        j, (k1, k2) = index.scale, index.shears
        a, b, c = PYRAMID_AXES[index.kind]
        na, nb, nc = shape[a], shape[b], shape[c]
        # restrict the factor living on array axis 2 to the rfft half
        keep = {ax: slice(None) for ax in (a, b, c)}
        keep[2] = slice(0, shape[2] // 2 + 1)
        ga = fft.fft(self.highpass(j).periodize((na,)))[keep[a]]
        f1 = fft.fft2(self.phi(j, k1).periodize((na, nb)))[keep[a], keep[b]]
        f2 = fft.fft2(self.phi(j, k2).periodize((na, nc)))[keep[a], keep[c]]
        spec = ga[:, None, None] * f1[:, :, None] * f2[:, None, :]
        return np.transpose(spec, np.argsort((a, b, c)))


def shearlet_taps_3d(j, k1, k2, pyramid, profile, fan=None, qmf=None) -> Taps:
    """Spatial taps of one pyramid filter."""
    profile = _as_profile(profile)
    levels = dict(profile.scales())
    if j not in levels:
        raise DomainError(f"scale {j} is not part of the profile")
    if max(abs(k1), abs(k2)) > 2 ** levels[j]:
        raise DomainError("shear out of range")
    if pyramid not in PYRAMIDS:
        raise DomainError(f"unknown pyramid {pyramid!r}")
    comps = _Components(profile, fan or default_fan_filter(), qmf or default_qmf())
    return comps.taps(FilterIndex3D(pyramid, j, (k1, k2)))


def build_shearlet_filter_3d(j, k1, k2, pyramid, profile, fan=None, qmf=None, shape=(64, 64, 64)):
    """Full complex spectrum of one pyramid filter."""
    shape = _check_shape(shape, 3)
    profile = _as_profile(profile)
    levels = dict(profile.scales())
    if j not in levels or max(abs(k1), abs(k2)) > 2 ** levels.get(j, -1):
        raise DomainError("scale or shear out of range")
    if pyramid not in PYRAMIDS:
        raise DomainError(f"unknown pyramid {pyramid!r}")
    comps = _Components(profile, fan or default_fan_filter(), qmf or default_qmf())
    half = comps.half_spectrum(FilterIndex3D(pyramid, j, (k1, k2)), shape)
    return hermitian_expand(half, shape)


class ShearletSystem3D(ShearletSystemBase):
    """A built 3D system; see :func:`build_system_3d`."""

    def __init__(self, shape, profile, fan, qmf, full_system, indices, spectra, comps):
        self.profile = profile
        self.fan = fan
        self.qmf = qmf
        self.full_system = full_system
        super().__init__(shape, indices, spectra, comps.taps)

    @property
    def dims(self) -> tuple:
        return self.shape

    def scale_of(self, i: int):
        return self.indices[i].scale

    def __repr__(self):
        return (
            f"ShearletSystem3D(shape={self.shape}, shear_levels={self.profile.shear_levels}, "
            f"j0={self.profile.j0}, full_system={self.full_system}, filters={len(self)})"
        )


def build_system_3d(
    shape,
    profile,
    fan: FanFilter | None = None,
    qmf: QmfPair | None = None,
    full_system: bool = False,
    *,
    workers: int | None = None,
) -> ShearletSystem3D:
    """Build every filter of a 3D digital shearlet system on a periodic grid.

    Parameters
    ----------
    shape : (int, int, int)
        Volume size, at least 8 along each axis.
    profile : ScaleProfile or sequence of int
        Shear levels per scale (coarse to fine).
    fan, qmf : optional
        Directional and wavelet filters; package defaults otherwise.
    full_system : bool
        Keep all seam filters.
    workers : int, optional
        Threads used to build filters in parallel.

    Returns
    -------
    ShearletSystem3D
    """
    shape = _check_shape(shape, 3)
    profile = _as_profile(profile)
    fan = fan or default_fan_filter()
    qmf = qmf or default_qmf()
    comps = _Components(profile, fan, qmf)
    comps.warm()
    indices = _index_list(profile, full_system)
    spectra = np.empty((len(indices),) + shape[:2] + (shape[2] // 2 + 1,), dtype=complex)

    def fill(i):
        spectra[i] = comps.half_spectrum(indices[i], shape)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fill, range(len(indices))))
    return ShearletSystem3D(shape, profile, fan, qmf, full_system, indices, spectra, comps)
