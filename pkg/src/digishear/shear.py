"""Digital shear operator on periodic grids and on finite filters.

A signal is a plain real ``numpy`` array (2D image or 3D volume) that is
treated as periodic along every axis.  The shear acts on one pair of axes:
the *sheared* axis, whose index gets displaced, and the *shear* axis, whose
coordinate sets the displacement::

    out[..., n_shear, ..., n_sheared, ...] = in[..., n_shear, ..., n_sheared + k * n_shear, ...]

On periodic grids ``n_shear`` is taken as its signed representative
(``0, 1, ..., -2, -1`` as in :func:`numpy.fft.fftfreq`), so that shears of
filters centered at the origin stay centered.

The digital shear ``S^d_{k/2^d}`` refines the sheared axis by ``2**d`` with the
lowpass cascade ``h_d``, applies the integer shear ``k``, undoes the
interpolation with the reversed cascade and returns to the original grid.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DomainError
from .filters import Taps, cascade, default_qmf

__all__ = [
    "upsample_axis",
    "downsample_axis",
    "convolve_axis",
    "resample_integer_shear",
    "digital_shear",
    "shear_taps",
]


def _check_axis(s: np.ndarray, axis: int) -> int:
    if not isinstance(axis, (int, np.integer)) or not -s.ndim <= axis < s.ndim:
        raise DomainError(f"axis {axis} is invalid for a {s.ndim}-dimensional signal")
    return int(axis) % s.ndim


def _check_factor(factor) -> int:
    if not isinstance(factor, (int, np.integer)) or factor < 1 or factor & (factor - 1):
        raise DomainError(f"factor must be a power of two, got {factor}")
    return int(factor)


def _interp_taps(d: int, interp_taps) -> Taps:
    if interp_taps is None:
        return cascade(default_qmf(), d).lowpass
    return interp_taps if isinstance(interp_taps, Taps) else Taps(interp_taps)


def upsample_axis(s, axis: int, factor: int) -> np.ndarray:
    """Insert ``factor - 1`` zeros after every sample along ``axis``."""
    s = np.asarray(s, dtype=float)
    axis = _check_axis(s, axis)
    factor = _check_factor(factor)
    shape = list(s.shape)
    shape[axis] *= factor
    out = np.zeros(shape)
    sl = [slice(None)] * s.ndim
    sl[axis] = slice(None, None, factor)
    out[tuple(sl)] = s
    return out


def downsample_axis(s, axis: int, factor: int) -> np.ndarray:
    """Keep every ``factor``-th sample along ``axis``, starting at index 0."""
    s = np.asarray(s, dtype=float)
    axis = _check_axis(s, axis)
    factor = _check_factor(factor)
    sl = [slice(None)] * s.ndim
    sl[axis] = slice(None, None, factor)
    return s[tuple(sl)].copy()


def convolve_axis(s, taps, axis: int) -> np.ndarray:
    """Circular convolution along one axis, centered on the tap origin.

    ``out[n] = sum_m taps[m] * s[n - m]`` with ``m`` relative to the origin and
    indices taken modulo the axis length.  Taps longer than four periods are
    accepted with a warning and wrapped before use.
    """
    s = np.asarray(s, dtype=float)
    axis = _check_axis(s, axis)
    t = taps if isinstance(taps, Taps) else Taps(taps)
    if t.ndim != 1:
        raise DomainError("convolve_axis expects 1D taps")
    n = s.shape[axis]
    if len(t) > 4 * n:
        warnings.warn(
            f"{len(t)} taps on an axis of length {n}; taps are periodized",
            RuntimeWarning,
            stacklevel=2,
        )
    wrapped = t.periodize((n,))
    out = np.zeros_like(s)
    for m in np.flatnonzero(wrapped):
        out += wrapped[m] * np.roll(s, m, axis=axis)
    return out


def _signed(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n).astype(int)


def resample_integer_shear(s, k: int, sheared_axis: int, shear_axis: int) -> np.ndarray:
    """Integer shear ``out[n_shear, n_sheared] = in[n_shear, n_sheared + k*n_shear]``.

    The map is a permutation of samples; indices wrap along ``sheared_axis``.
    """
    s = np.asarray(s, dtype=float)
    a = _check_axis(s, sheared_axis)
    b = _check_axis(s, shear_axis)
    if a == b:
        raise DomainError("sheared and shear axes must differ")
    k = int(k)
    if k == 0:
        return s.copy()
    moved = np.moveaxis(s, (b, a), (0, 1))
    nb, na = moved.shape[:2]
    idx = (np.arange(na)[None, :] + k * _signed(nb)[:, None]) % na
    out = moved[np.arange(nb)[:, None], idx]
    return np.moveaxis(out, (0, 1), (b, a))


def digital_shear(
    s,
    k: int,
    d: int,
    interp_taps=None,
    sheared_axis: int = 0,
    shear_axis: int = 1,
) -> np.ndarray:
    """Digital shear ``S^d_{k/2^d}`` of a periodic signal.

    Parameters
    ----------
    s : array_like
        Real 2D or 3D signal.
    k : int
        Integer shear, ``|k| <= 2**d``.
    d : int
        Shear level; the sheared axis is refined by ``2**d``.
    interp_taps : Taps, optional
        Interpolation filter, by default the lowpass cascade ``h_d`` of the
        default QMF pair.  Taps are expected to sum to one; the result is
        scaled by ``2**d`` to compensate for the zero insertion.
    sheared_axis, shear_axis : int
        The displaced axis and the axis providing the shear coordinate.

    Returns
    -------
    ndarray
        Signal of the same shape.
    """
    if d < 0:
        raise DomainError(f"shear level must be nonnegative, got {d}")
    if abs(k) > 2**d:
        raise DomainError(f"|k| = {abs(k)} exceeds 2**d = {2**d}")
    s = np.asarray(s, dtype=float)
    if d == 0:
        return resample_integer_shear(s, k, sheared_axis, shear_axis)
    f = 2**d
    h = _interp_taps(d, interp_taps)
    u = upsample_axis(s, sheared_axis, f)
    u = convolve_axis(u, h, sheared_axis)
    u = resample_integer_shear(u, k, sheared_axis, shear_axis)
    u = convolve_axis(u, h.reversed(), sheared_axis)
    return f * downsample_axis(u, sheared_axis, f)


def _convolve_along(t: Taps, h: Taps, axis: int) -> Taps:
    shape = [1] * t.ndim
    shape[axis] = len(h)
    origin = [0] * t.ndim
    origin[axis] = h.origin[0]
    return t.convolve(Taps(h.coeffs.reshape(shape), tuple(origin)))


def shear_taps(
    taps: Taps,
    k: int,
    d: int,
    interp_taps=None,
    sheared_axis: int = 0,
    shear_axis: int = 1,
) -> Taps:
    """Digital shear of a finite filter on the infinite grid.

    Same operator as :func:`digital_shear` but without wrap-around: the
    support grows as needed, so periodizing the result onto any grid gives
    the periodic shear of the periodized filter whenever no aliasing occurs.
    """
    if d < 0:
        raise DomainError(f"shear level must be nonnegative, got {d}")
    if abs(k) > 2**d:
        raise DomainError(f"|k| = {abs(k)} exceeds 2**d = {2**d}")
    a, b = sheared_axis % taps.ndim, shear_axis % taps.ndim
    if a == b:
        raise DomainError("sheared and shear axes must differ")
    if k == 0 and d == 0:
        return taps
    f = 2**d
    h = _interp_taps(d, interp_taps)
    factors = [1] * taps.ndim
    factors[a] = f
    u = taps.upsample(factors)
    if d > 0:
        u = _convolve_along(u, h, a)

    if k != 0:
        c = np.moveaxis(u.coeffs, (a, b), (0, 1))
        nb = u.indices(b)
        shifts = -k * nb  # out(n_a, n_b) = u(n_a + k n_b, n_b)
        lo = -u.origin[a] + shifts.min()
        length = c.shape[0] + shifts.max() - shifts.min()
        out = np.zeros((length,) + c.shape[1:])
        for col, sh in enumerate(shifts):
            start = -u.origin[a] + sh - lo
            out[start : start + c.shape[0], col] = c[:, col]
        origin = list(u.origin)
        origin[a] = -lo
        u = Taps(np.moveaxis(out, (0, 1), (a, b)), tuple(origin))

    if d > 0:
        u = _convolve_along(u, h.reversed(), a)
    # keep positions that are multiples of f along the sheared axis
    first = u.origin[a] % f
    sl = [slice(None)] * u.ndim
    sl[a] = slice(first, None, f)
    origin = list(u.origin)
    origin[a] = (u.origin[a] - first) // f
    return Taps(f * u.coeffs[tuple(sl)], tuple(origin))
