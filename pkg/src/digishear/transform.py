"""Forward and inverse digital shearlet transforms and coefficient files.

The transform is undecimated: band ``i`` is the periodic cross-correlation
of the signal with filter ``i``::

    band_i = IFFT(FFT(f) * conj(psi_hat_i))

and reconstruction uses the dual filters ``psi_hat_i / Psi``::

    f = IFFT(sum_i FFT(band_i) * psi_hat_i / Psi).

All FFTs are real-to-complex (:func:`scipy.fft.rfftn`), batched over bands
in chunks so that peak memory stays bounded.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from ._system import ShearletSystemBase
from .errors import FormatError, ShapeError
from .system2d import FilterIndex2D
from .system3d import FilterIndex3D

__all__ = [
    "CoefficientStack",
    "forward",
    "inverse",
    "forward_3d",
    "inverse_3d",
    "serialize",
    "deserialize",
    "save_coefficients",
    "load_coefficients",
    "KIND_CODES",
]

CHUNK_BYTES = 4 * 2**20  # cache-sized batches; larger ones are memory bound

KIND_CODES = {
    "lowpass": 0,
    "cone_horizontal": 1,
    "cone_vertical": 2,
    "pyramid_1": 1,
    "pyramid_2": 2,
    "pyramid_3": 3,
}
_KINDS_2D = {0: "lowpass", 1: "cone_horizontal", 2: "cone_vertical"}
_KINDS_3D = {0: "lowpass", 1: "pyramid_1", 2: "pyramid_2", 3: "pyramid_3"}

MAGIC = b"SHCF"
VERSION = 1


@dataclass
class CoefficientStack:
    """Transform coefficients, one real band per system filter.

    Attributes
    ----------
    bands : ndarray, shape ``(R,) + signal_shape``
    indices : list
        Filter index records, aligned with ``bands``.
    descriptor : dict or None
        Parameters of the generating system, if known.
    """

    bands: np.ndarray
    indices: list
    descriptor: dict | None = field(default=None)

    def __post_init__(self):
        self.bands = np.asarray(self.bands, dtype=float)
        if self.bands.shape[0] != len(self.indices):
            raise ShapeError(
                f"{self.bands.shape[0]} bands but {len(self.indices)} index records"
            )

    def __len__(self) -> int:
        return self.bands.shape[0]

    @property
    def shape(self) -> tuple:
        """Shape of the underlying signal."""
        return self.bands.shape[1:]

    def copy(self) -> "CoefficientStack":
        return CoefficientStack(self.bands.copy(), list(self.indices), self.descriptor)

    def with_bands(self, bands) -> "CoefficientStack":
        return CoefficientStack(bands, list(self.indices), self.descriptor)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_bands(self.bands + other.bands)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_bands(self.bands - other.bands)

    def __mul__(self, scalar):
        return self.with_bands(self.bands * float(scalar))

    __rmul__ = __mul__


def _check_compatible(a: CoefficientStack, b: CoefficientStack):
    if a.bands.shape != b.bands.shape or list(a.indices) != list(b.indices):
        raise ShapeError("coefficient stacks do not match")


def _chunks(n_bands: int, shape):
    per_band = 16 * (int(np.prod(shape[:-1])) * (shape[-1] // 2 + 1)) * 2
    step = max(1, CHUNK_BYTES // per_band)
    return range(0, n_bands, step), step


def _axes(shape):
    return tuple(range(-len(shape), 0))


def forward(signal, system: ShearletSystemBase, workers: int | None = None) -> CoefficientStack:
    """Digital shearlet coefficients of ``signal``.

    Parameters
    ----------
    signal : array_like
        Real image or volume with the system's shape.
    system : ShearletSystem2D or ShearletSystem3D
    workers : int, optional
        Threads for the FFTs (see :func:`scipy.fft.rfftn`).

    Returns
    -------
    CoefficientStack

    Raises
    ------
    ShapeError
        If the signal shape differs from the system shape.
    """
    f = np.asarray(signal, dtype=float)
    if f.shape != system.shape:
        raise ShapeError(f"signal shape {f.shape} does not match system shape {system.shape}")
    shape, axes = system.shape, _axes(system.shape)
    spec = fft.rfftn(f, axes=axes, workers=workers)
    bands = np.empty((len(system),) + shape)
    starts, step = _chunks(len(system), shape)
    for s in starts:
        prod = spec * np.conj(system.spectra[s : s + step])
        bands[s : s + step] = fft.irfftn(prod, s=shape, axes=axes, workers=workers)
    return CoefficientStack(bands, list(system.indices), descriptor_of(system))


def inverse(coeffs: CoefficientStack, system: ShearletSystemBase, workers: int | None = None) -> np.ndarray:
    """Reconstruct a signal from its coefficients with the dual filters.

    Raises
    ------
    ShapeError
        If the stack does not belong to a system of this layout.
    """
    if coeffs.shape != system.shape or len(coeffs) != len(system):
        raise ShapeError(
            f"stack {coeffs.bands.shape} does not match system "
            f"({len(system)},) + {system.shape}"
        )
    if list(coeffs.indices) != list(system.indices):
        raise ShapeError("coefficient index table differs from the system's filters")
    shape, axes = system.shape, _axes(system.shape)
    acc = np.zeros(system.spectra.shape[1:], dtype=complex)
    starts, step = _chunks(len(system), shape)
    for s in starts:
        spec = fft.rfftn(coeffs.bands[s : s + step], axes=axes, workers=workers)
        acc += np.einsum("i...,i...->...", spec, system.spectra[s : s + step])
    acc /= system.frame_weight_half
    return fft.irfftn(acc, s=shape, axes=axes, workers=workers)


forward_3d = forward
inverse_3d = inverse


def descriptor_of(system) -> dict:
    """Plain-data description of a system, enough to rebuild it."""
    return {
        "dims": tuple(system.shape),
        "j0": system.profile.j0,
        "shear_levels": tuple(system.profile.shear_levels),
        "full_system": bool(system.full_system),
        "qmf": tuple(float(v) for v in system.qmf.lowpass.coeffs),
        "qmf_origin": system.qmf.lowpass.origin[0],
        "fan_sha256": system.fan.checksum(),
    }


_HEAD = struct.Struct("<4sHB")
_ENTRY = struct.Struct("<Biii")


def _index_fields(idx, ndim):
    if idx.kind == "lowpass":
        return KIND_CODES["lowpass"], -1, 0, 0
    if ndim == 2:
        return KIND_CODES[idx.kind], idx.scale, idx.shear, 0
    return KIND_CODES[idx.kind], idx.scale, idx.shears[0], idx.shears[1]


def _index_record(code, scale, k1, k2, ndim):
    if ndim == 2:
        kind = _KINDS_2D.get(code)
        if kind is None:
            raise FormatError(f"unknown band kind code {code}")
        return FilterIndex2D(kind) if code == 0 else FilterIndex2D(kind, scale, k1)
    kind = _KINDS_3D.get(code)
    if kind is None:
        raise FormatError(f"unknown band kind code {code}")
    return FilterIndex3D(kind) if code == 0 else FilterIndex3D(kind, scale, (k1, k2))


def serialize(coeffs: CoefficientStack) -> bytes:
    """Encode a stack in the SHCF layout (little-endian, row-major doubles)."""
    ndim = coeffs.bands.ndim - 1
    if ndim not in (2, 3):
        raise ShapeError("only 2D and 3D stacks can be serialized")
    parts = [_HEAD.pack(MAGIC, VERSION, ndim)]
    parts.append(struct.pack(f"<{ndim}I", *coeffs.shape))
    parts.append(struct.pack("<I", len(coeffs)))
    for idx in coeffs.indices:
        parts.append(_ENTRY.pack(*_index_fields(idx, ndim)))
    parts.append(np.ascontiguousarray(coeffs.bands, dtype="<f8").tobytes())
    return b"".join(parts)


def deserialize(data: bytes, expected_bands: int | None = None) -> CoefficientStack:
    """Decode an SHCF byte stream.

    Parameters
    ----------
    expected_bands : int, optional
        Redundancy of the system the stack is meant for; checked against the
        header.

    Raises
    ------
    FormatError
        On wrong magic, unsupported version, truncation or trailing bytes.
    """
    view = memoryview(data)

    def take(n, what):
        nonlocal view
        if len(view) < n:
            raise FormatError(f"truncated coefficient stream while reading {what}")
        chunk, view = view[:n], view[n:]
        return bytes(chunk)

    magic, version, ndim = _HEAD.unpack(take(_HEAD.size, "header"))
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if ndim not in (2, 3):
        raise FormatError(f"unsupported dimensionality {ndim}")
    dims = struct.unpack(f"<{ndim}I", take(4 * ndim, "dims"))
    (count,) = struct.unpack("<I", take(4, "band count"))
    if expected_bands is not None and count != expected_bands:
        raise FormatError(f"stream has {count} bands, system has {expected_bands}")
    indices = [
        _index_record(*_ENTRY.unpack(take(_ENTRY.size, "index table")), ndim)
        for _ in range(count)
    ]
    n = count * int(np.prod(dims))
    raw = take(8 * n, "band data")
    if len(view):
        raise FormatError(f"{len(view)} trailing bytes after band data")
    bands = np.frombuffer(raw, dtype="<f8").astype(float).reshape((count,) + dims)
    return CoefficientStack(bands, indices)


def save_coefficients(path, coeffs: CoefficientStack) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(coeffs))


def load_coefficients(path, expected_bands: int | None = None) -> CoefficientStack:
    with open(path, "rb") as fh:
        return deserialize(fh.read(), expected_bands)
