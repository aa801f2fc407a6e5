"""Building-block filters: the quadrature mirror pair, its cascades and the fan filter.

All filters are :class:`Taps`, a finite coefficient array together with the
index of the sample sitting at the origin.  Frequencies are measured in cycles
per sample, so the transfer function of ``h`` is
``h_hat(xi) = sum_n h[n] exp(-2j*pi*n*xi)`` with ``xi`` in ``[-1/2, 1/2)``.

Array axis 0 plays the role of the first coordinate ``x1`` of the continuous
theory (the "horizontal" direction of the shearlet cones).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev, polynomial
from scipy import signal as sps

from .errors import AssetError, DomainError, InvalidFilterError

__all__ = [
    "Taps",
    "QmfPair",
    "FilterCascade",
    "FanFilter",
    "ScaleProfile",
    "PROFILES",
    "default_lowpass",
    "default_qmf",
    "mirror_highpass",
    "cascade",
    "orthonormality_defect",
    "default_fan_filter",
    "load_fan_filter",
    "format_fan_filter",
    "upsample_filter_2d",
    "alpha_to_shear_levels",
    "FAN_ASSET_NAME",
    "FAN_ASSET_SHA256",
]

FAN_ASSET_NAME = "fan_dmaxflat4.txt"
FAN_ASSET_SHA256 = "bfe7f3f3d4de901c456d2c99b3ae039a5c0374faae32e27c72394396718f8bf3"


def _is_power_of_two(n) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Taps:
    """Finite real filter with an explicit origin.

    Parameters
    ----------
    coeffs : array_like
        Filter coefficients; any number of dimensions.
    origin : tuple of int, optional
        Array index of the sample at position ``n = 0``.  Defaults to the
        center ``(size - 1) // 2`` along every axis.
    """

    coeffs: np.ndarray
    origin: tuple = field(default=None)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 0:
            c = c.reshape(1)
        if c.size == 0:
            raise InvalidFilterError("filter has no taps")
        c.setflags(write=False)
        origin = self.origin
        if origin is None:
            origin = tuple((s - 1) // 2 for s in c.shape)
        elif np.isscalar(origin):
            origin = (int(origin),)
        origin = tuple(int(o) for o in origin)
        if len(origin) != c.ndim:
            raise InvalidFilterError("origin must have one entry per axis")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def impulse(cls, ndim: int = 1) -> "Taps":
        """Unit impulse at the origin."""
        return cls(np.ones((1,) * ndim), (0,) * ndim)

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def indices(self, axis: int = 0) -> np.ndarray:
        """Positions ``n`` of the taps along ``axis``."""
        return np.arange(self.coeffs.shape[axis]) - self.origin[axis]

    def response(self, *xi) -> np.ndarray:
        """Evaluate the transfer function at frequencies ``xi`` (one array per axis)."""
        if len(xi) != self.ndim:
            raise DomainError(f"expected {self.ndim} frequency arrays, got {len(xi)}")
        xi = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in xi])
        exps = [np.exp(-2j * np.pi * x[..., None] * self.indices(a)) for a, x in enumerate(xi)]
        letters = "abcdefgh"[: self.ndim]
        spec = ",".join(f"...{c}" for c in letters) + f",{letters}->..."
        return np.einsum(spec, *exps, self.coeffs)

    def reversed(self) -> "Taps":
        """The filter ``n -> h(-n)``."""
        flipped = self.coeffs[(slice(None, None, -1),) * self.ndim]
        return Taps(flipped, tuple(s - 1 - o for s, o in zip(self.shape, self.origin)))

    def convolve(self, other: "Taps") -> "Taps":
        """Full linear convolution; origins add."""
        if other.ndim != self.ndim:
            raise InvalidFilterError("cannot convolve filters of different dimension")
        out = sps.convolve(self.coeffs, other.coeffs, method="direct")
        return Taps(out, tuple(a + b for a, b in zip(self.origin, other.origin)))

    def upsample(self, factors) -> "Taps":
        """Insert ``factor - 1`` zeros between taps along every axis."""
        factors = (factors,) * self.ndim if np.isscalar(factors) else tuple(factors)
        shape = tuple((s - 1) * f + 1 for s, f in zip(self.shape, factors))
        out = np.zeros(shape)
        out[tuple(slice(None, None, f) for f in factors)] = self.coeffs
        return Taps(out, tuple(o * f for o, f in zip(self.origin, factors)))

    def periodize(self, shape) -> np.ndarray:
        """Wrap the taps onto a periodic grid with the origin at index 0."""
        shape = tuple(shape)
        if len(shape) != self.ndim:
            raise DomainError("grid dimension does not match filter dimension")
        grid = np.zeros(shape)
        idx = np.ix_(*[(self.indices(a) % n) for a, n in enumerate(shape)])
        np.add.at(grid, idx, self.coeffs)
        return grid

    def sum(self) -> float:
        return float(self.coeffs.sum())

    def __eq__(self, other):
        if not isinstance(other, Taps):
            return NotImplemented
        return self.origin == other.origin and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


def _as_taps(h) -> Taps:
    return h if isinstance(h, Taps) else Taps(h)


@dataclass(frozen=True)
class QmfPair:
    """Lowpass/highpass quadrature mirror pair.

    The lowpass is normalized so that its taps sum to one.
    """

    lowpass: Taps
    highpass: Taps

    def __post_init__(self):
        for t in (self.lowpass, self.highpass):
            if t.ndim != 1:
                raise InvalidFilterError("QMF taps must be one-dimensional")
        if abs(self.lowpass.sum() - 1.0) > 1e-12:
            raise InvalidFilterError(
                f"lowpass taps must sum to 1, got {self.lowpass.sum():.15g}"
            )

    @classmethod
    def from_lowpass(cls, lowpass) -> "QmfPair":
        """Pair a lowpass with its mirror highpass."""
        h = _as_taps(lowpass)
        return cls(h, mirror_highpass(h))


@dataclass(frozen=True)
class FilterCascade:
    """Level-``j`` cascades ``h_j`` and ``g_j`` of a QMF pair.

    ``highpass`` is ``None`` at level 0, where ``g_0`` is undefined.
    """

    level: int
    lowpass: Taps
    highpass: Taps | None


@dataclass(frozen=True)
class FanFilter:
    """Two-dimensional directional filter with its provenance tag."""

    taps: Taps
    provenance: str = "custom"

    def __post_init__(self):
        if self.taps.ndim != 2 or any(s % 2 == 0 for s in self.taps.shape):
            raise InvalidFilterError("fan filter must be a 2D grid of odd extent")

    @classmethod
    def impulse(cls) -> "FanFilter":
        """Trivial fan filter; turns the system into a separable wavelet frame."""
        return cls(Taps.impulse(2), "impulse")

    def checksum(self) -> str:
        return hashlib.sha256(format_fan_filter(self.taps).encode()).hexdigest()


@dataclass(frozen=True)
class ScaleProfile:
    """Number of scales and the shear level ``d_j`` used at each of them.

    Parameters
    ----------
    shear_levels : sequence of int
        ``d_j`` for ``j = j0, ..., j0 + n_scales - 1`` (coarse to fine).
    coarsest_scale_offset : int
        ``j0``; the finest absolute scale is ``J - 1`` with ``J = j0 + n_scales``.
    """

    shear_levels: tuple
    coarsest_scale_offset: int = 0

    def __post_init__(self):
        levels = tuple(int(d) for d in self.shear_levels)
        if any(d < 0 for d in levels):
            raise DomainError("shear levels must be nonnegative")
        if self.coarsest_scale_offset < 0:
            raise DomainError("coarsest scale offset must be nonnegative")
        object.__setattr__(self, "shear_levels", levels)

    @property
    def n_scales(self) -> int:
        return len(self.shear_levels)

    @property
    def j0(self) -> int:
        return self.coarsest_scale_offset

    @property
    def finest(self) -> int:
        """``J = j0 + n_scales``."""
        return self.coarsest_scale_offset + self.n_scales

    def scales(self):
        """Pairs ``(j, d_j)`` from coarse to fine."""
        return [(self.j0 + i, d) for i, d in enumerate(self.shear_levels)]

    @classmethod
    def parabolic(cls, n_scales: int, j0: int = 0) -> "ScaleProfile":
        """``d_j = ceil(j / 2)`` counted from one; the usual parabolic profile."""
        return cls(tuple((j + 1) // 2 for j in range(1, n_scales + 1)), j0)


PROFILES = {
    "SL2D_1": ScaleProfile((0, 0, 1, 1)),
    "SL2D_2": ScaleProfile((1, 1, 2, 2)),
    "SL3D_1": ScaleProfile((0, 0, 1)),
    "SL3D_2": ScaleProfile((1, 1, 2)),
}


@lru_cache(maxsize=None)
def _maxflat_taps() -> np.ndarray:
    # Design in x = sin^2(w/2): H = 1 + a x^3 + b x^4 is flat to third order at
    # w = 0, has a double zero at w = pi and passes 1/sqrt(2) at w = pi/2.
    s2 = math.sqrt(2.0)
    px = np.array([1.0, 0.0, 0.0, 8 * s2 - 15, 14 - 8 * s2])
    # x = (1 - cos w) / 2, then expand in Chebyshev polynomials of cos w.
    pc = np.zeros(1)
    for m, a in enumerate(px):
        pc = polynomial.polyadd(pc, a * polynomial.polypow([0.5, -0.5], m))
    ch = chebyshev.poly2cheb(pc)
    taps = np.concatenate([ch[:0:-1] / 2, ch[:1], ch[1:] / 2])
    # Symmetrize exactly and pin the DC gain.
    taps = 0.5 * (taps + taps[::-1])
    return taps / taps.sum()


def default_lowpass() -> Taps:
    """Symmetric 9-tap maximally flat lowpass, normalized to unit sum.

    Its transfer function is ``1 + (8*sqrt(2) - 15) x**3 + (14 - 8*sqrt(2)) x**4``
    with ``x = sin(pi*xi)**2``: flat up to third order at DC, a double zero at
    Nyquist and ``1/sqrt(2)`` at a quarter of the sampling rate.

    Returns
    -------
    Taps
        Nine taps, origin at index 4.
    """
    return Taps(_maxflat_taps(), (4,))


def default_qmf() -> QmfPair:
    """The default lowpass and its mirror highpass."""
    return QmfPair.from_lowpass(default_lowpass())


def mirror_highpass(lowpass) -> Taps:
    """``g(n) = (-1)**n h(n)`` with ``n`` counted from the filter origin."""
    h = _as_taps(lowpass)
    if h.ndim != 1:
        raise InvalidFilterError("mirror_highpass expects a 1D filter")
    sign = np.where(h.indices() % 2 == 0, 1.0, -1.0)
    return Taps(h.coeffs * sign, h.origin)


def cascade(pair: QmfPair, level: int) -> FilterCascade:
    """Level-``j`` cascades of a QMF pair.

    ``h_j`` has transfer function ``prod_{k<j} h_hat(2**k xi)`` and ``g_j`` has
    ``g_hat(2**(j-1) xi) * h_hat_{j-1}(xi)``.

    Raises
    ------
    DomainError
        If ``level`` is negative.
    """
    if level < 0:
        raise DomainError(f"cascade level must be nonnegative, got {level}")
    return _cascade(pair.lowpass, pair.highpass, int(level))


@lru_cache(maxsize=128)
def _cascade_cached(h_key, g_key, level):
    h = Taps(np.frombuffer(h_key[0]), h_key[1])
    g = Taps(np.frombuffer(g_key[0]), g_key[1])
    hj = Taps.impulse()
    for k in range(level - 1):
        hj = hj.convolve(h.upsample(2**k))
    g_level = None
    if level >= 1:
        g_level = g.upsample(2 ** (level - 1)).convolve(hj)
        hj = hj.convolve(h.upsample(2 ** (level - 1)))
    return FilterCascade(level, hj, g_level)


def _cascade(h: Taps, g: Taps, level: int) -> FilterCascade:
    return _cascade_cached(
        (h.coeffs.tobytes(), h.origin), (g.coeffs.tobytes(), g.origin), level
    )


def orthonormality_defect(lowpass) -> float:
    """``max_l |2 sum_n h(n) h(n + 2l) - delta_l|`` over all integer shifts ``l``."""
    h = _as_taps(lowpass).coeffs
    if h.ndim != 1:
        raise InvalidFilterError("orthonormality_defect expects a 1D filter")
    corr = np.correlate(h, h, mode="full")  # lags -(L-1) .. L-1
    lags = np.arange(-(h.size - 1), h.size)
    even = corr[lags % 2 == 0] * 2
    even[lags[lags % 2 == 0] == 0] -= 1.0
    return float(np.max(np.abs(even)))


def format_fan_filter(taps: Taps) -> str:
    """Plain-text serialization used for the shipped fan-filter asset."""
    rows, cols = taps.shape
    lines = [f"{rows} {cols} {taps.origin[0]} {taps.origin[1]}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in taps.coeffs]
    return "\n".join(lines) + "\n"


def load_fan_filter(text: str, provenance: str = "custom") -> FanFilter:
    """Parse the plain-text fan-filter format.

    Raises
    ------
    AssetError
        If the header or body is malformed.
    """
    try:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols, r0, c0 = (int(v) for v in lines[0].split())
        data = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
    except (ValueError, IndexError) as exc:
        raise AssetError(f"malformed fan filter text: {exc}") from exc
    if data.shape != (rows, cols):
        raise AssetError(f"fan filter body is {data.shape}, header says {(rows, cols)}")
    return FanFilter(Taps(data, (r0, c0)), provenance)


@lru_cache(maxsize=1)
def default_fan_filter() -> FanFilter:
    """Maximally flat fan filter of order 4 shipped with the package.

    The filter is a McClellan transform of a 1D maximally flat prototype,
    modulated along axis 0 so that its passband is the horizontal cone
    ``|xi_1| < |xi_0|``.  Its taps sum to ``1/sqrt(2)`` and its passband gain is
    close to one; the system builders rescale it to unit l1 norm.

    Raises
    ------
    AssetError
        If the data file is missing or its checksum does not match.
    """
    try:
        raw = resources.files(__package__).joinpath("data", FAN_ASSET_NAME).read_bytes()
    except (FileNotFoundError, OSError) as exc:
        raise AssetError(f"fan filter asset {FAN_ASSET_NAME} is missing") from exc
    digest = hashlib.sha256(raw).hexdigest()
    if digest != FAN_ASSET_SHA256:
        raise AssetError(f"fan filter asset checksum mismatch ({digest})")
    return load_fan_filter(raw.decode("ascii"), provenance="dmaxflat4")


def upsample_filter_2d(taps, factor_rows: int, factor_cols: int) -> Taps:
    """Zero-insertion upsampling of a 2D filter.

    The transfer function of the result at ``(xi0, xi1)`` equals that of the
    input at ``(factor_rows * xi0, factor_cols * xi1)``.
    """
    for f in (factor_rows, factor_cols):
        if not _is_power_of_two(f):
            raise DomainError(f"upsampling factor must be a power of two, got {f}")
    t = _as_taps(taps)
    if t.ndim != 2:
        raise InvalidFilterError("upsample_filter_2d expects a 2D filter")
    return t.upsample((factor_rows, factor_cols))


def alpha_to_shear_levels(alpha: Sequence[float], scales: Sequence[int]) -> tuple:
    """Shear levels ``d_j = ceil((2 - alpha_j) j / 2)`` for the given absolute scales.

    Parameters
    ----------
    alpha : sequence of float
        Anisotropy per scale, each in the open interval (0, 2); a scalar is
        broadcast.  ``alpha = 1`` is parabolic scaling.
    scales : sequence of int
        Absolute scale indices ``j``.
    """
    scales = [int(j) for j in scales]
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (len(scales),))
    if np.any((alpha <= 0) | (alpha >= 2)) or not np.all(np.isfinite(alpha)):
        raise DomainError("alpha must lie in the open interval (0, 2)")
    # Round before ceil so that products like 1.5 * 4 / 2 do not pick up 1 ulp.
    return tuple(int(math.ceil(round((2 - a) * j / 2, 12))) for a, j in zip(alpha, scales))
