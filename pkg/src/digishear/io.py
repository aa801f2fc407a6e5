"""File formats: binary PGM images, SVOL volumes and system descriptors.

SVOL layout (little-endian)::

    b"SVOL"  u16 version  u32 X  u32 Y  u32 Z  f64[X*Y*Z] (row-major)

A stack of 2D frames ``frames[t]`` of equal size converts to SVOL with
``np.stack(frames, axis=-1)`` or ``axis=0`` depending on which axis should be
time; :func:`write_svol` accepts any real 3D array.

System descriptors are ``key = value`` text files holding everything needed
to rebuild a system bit for bit.
"""

from __future__ import annotations

import re
import struct

import numpy as np

from .errors import AssetError, FormatError
from .filters import (
    FanFilter,
    QmfPair,
    ScaleProfile,
    Taps,
    default_fan_filter,
)

__all__ = [
    "read_pgm",
    "write_pgm",
    "to_pixels",
    "read_svol",
    "write_svol",
    "read_signal",
    "write_signal",
    "format_descriptor",
    "parse_descriptor",
    "write_descriptor",
    "read_descriptor",
    "system_from_descriptor",
]

SVOL_MAGIC = b"SVOL"
SVOL_VERSION = 1
_SVOL_HEAD = struct.Struct("<4sH3I")

_PGM_TOKEN = re.compile(rb"(?:\s+|#[^\n]*\n?)*(\S+)")


def read_pgm(path):
    """Read a binary (P5) PGM.

    Returns
    -------
    image : ndarray of float64
    maxval : int
        Declared maximum gray value (255 for 8-bit files, up to 65535 for 16-bit).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    pos, fields = 0, []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise FormatError(f"{path}: truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {fields[0]!r})")
    try:
        width, height, maxval = (int(v) for v in fields[1:])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if not 0 < maxval < 65536 or width <= 0 or height <= 0:
        raise FormatError(f"{path}: invalid PGM header values")
    pos += 1  # single whitespace byte before the raster
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = width * height * dtype.itemsize
    if len(data) - pos < n:
        raise FormatError(f"{path}: PGM raster is truncated")
    img = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    return img.reshape(height, width).astype(float), maxval


def to_pixels(image, maxval: int = 255) -> np.ndarray:
    """Clamp to ``[0, maxval]`` and round to integers."""
    return np.clip(np.rint(np.asarray(image, dtype=float)), 0, maxval)


def write_pgm(path, image, maxval: int = 255) -> None:
    """Write a P5 PGM; values are clamped and rounded to the bit depth of ``maxval``."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise FormatError("PGM images must be two-dimensional")
    if not 0 < maxval < 65536:
        raise FormatError("maxval must lie in 1..65535")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    raster = to_pixels(img, maxval).astype(dtype)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + raster.tobytes())


def read_svol(path) -> np.ndarray:
    """Read an SVOL volume as a float64 array of shape ``(X, Y, Z)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _SVOL_HEAD.size:
        raise FormatError(f"{path}: truncated SVOL header")
    magic, version, *dims = _SVOL_HEAD.unpack_from(data)
    if magic != SVOL_MAGIC:
        raise FormatError(f"{path}: bad SVOL magic {magic!r}")
    if version != SVOL_VERSION:
        raise FormatError(f"{path}: unsupported SVOL version {version}")
    n = int(np.prod(dims))
    body = data[_SVOL_HEAD.size :]
    if len(body) != 8 * n:
        raise FormatError(f"{path}: SVOL body has {len(body)} bytes, expected {8 * n}")
    return np.frombuffer(body, dtype="<f8").astype(float).reshape(dims)


def write_svol(path, volume) -> None:
    vol = np.asarray(volume, dtype=float)
    if vol.ndim != 3:
        raise FormatError("SVOL volumes must be three-dimensional")
    with open(path, "wb") as fh:
        fh.write(_SVOL_HEAD.pack(SVOL_MAGIC, SVOL_VERSION, *vol.shape))
        fh.write(np.ascontiguousarray(vol, dtype="<f8").tobytes())


def read_signal(path):
    """Read a PGM image or an SVOL volume, chosen by the file's magic bytes.

    Returns
    -------
    (ndarray, int or None)
        The data and the PGM ``maxval`` (``None`` for volumes).
    """
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == SVOL_MAGIC:
        return read_svol(path), None
    if magic[:2] == b"P5":
        return read_pgm(path)
    raise FormatError(f"{path}: neither a P5 PGM nor an SVOL file")


def write_signal(path, data, maxval: int | None = 255) -> None:
    """Write 2D data as PGM (or SVOL if the name ends in ``.svol``) and 3D data as SVOL."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 3 or str(path).endswith(".svol"):
        if data.ndim == 2:
            raise FormatError("SVOL output needs a three-dimensional signal")
        write_svol(path, data)
    else:
        write_pgm(path, data, maxval or 255)


def format_descriptor(system) -> str:
    """Text descriptor of a system (grid, profile, filters)."""
    qmf = system.qmf.lowpass
    lines = [
        "# digital shearlet system",
        f"dims = {' '.join(str(n) for n in system.shape)}",
        f"j0 = {system.profile.j0}",
        f"shear_levels = {' '.join(str(d) for d in system.profile.shear_levels)}",
        f"full_system = {int(system.full_system)}",
        f"qmf_origin = {qmf.origin[0]}",
        f"qmf = {' '.join(repr(float(v)) for v in qmf.coeffs)}",
        f"fan_provenance = {system.fan.provenance}",
        f"fan_sha256 = {system.fan.checksum()}",
    ]
    return "\n".join(lines) + "\n"


_REQUIRED = ("dims", "j0", "shear_levels", "full_system", "qmf_origin", "qmf", "fan_sha256")


def parse_descriptor(text: str) -> dict:
    """Parse descriptor text into a dict of typed values.

    Raises
    ------
    FormatError
        On unknown or missing keys and malformed values.
    """
    raw = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, sep, value = ln.partition("=")
        if not sep:
            raise FormatError(f"descriptor line without '=': {ln!r}")
        raw[key.strip()] = value.strip()
    unknown = set(raw) - set(_REQUIRED) - {"fan_provenance"}
    if unknown:
        raise FormatError(f"unknown descriptor keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise FormatError(f"descriptor is missing {missing}")
    try:
        return {
            "dims": tuple(int(v) for v in raw["dims"].split()),
            "j0": int(raw["j0"]),
            "shear_levels": tuple(int(v) for v in raw["shear_levels"].split()),
            "full_system": bool(int(raw["full_system"])),
            "qmf_origin": int(raw["qmf_origin"]),
            "qmf": tuple(float(v) for v in raw["qmf"].split()),
            "fan_provenance": raw.get("fan_provenance", "custom"),
            "fan_sha256": raw["fan_sha256"],
        }
    except ValueError as exc:
        raise FormatError(f"malformed descriptor value: {exc}") from exc


def write_descriptor(path, system) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_descriptor(system))


def read_descriptor(path) -> dict:
    with open(path, encoding="ascii") as fh:
        return parse_descriptor(fh.read())


def system_from_descriptor(desc: dict, fan: FanFilter | None = None, workers=None):
    """Rebuild the system a descriptor describes.

    Parameters
    ----------
    fan : FanFilter, optional
        Directional filter to use when the descriptor does not refer to the
        shipped one; its checksum must match.

    Raises
    ------
    AssetError
        If no fan filter with the recorded checksum is available.
    """
    from .system2d import build_system_2d
    from .system3d import build_system_3d

    candidates = [fan] if fan is not None else [default_fan_filter(), FanFilter.impulse()]
    match = [f for f in candidates if f.checksum() == desc["fan_sha256"]]
    if not match:
        raise AssetError(f"no fan filter with checksum {desc['fan_sha256']} is available")
    qmf = QmfPair.from_lowpass(Taps(desc["qmf"], (desc["qmf_origin"],)))
    profile = ScaleProfile(desc["shear_levels"], desc["j0"])
    build = {2: build_system_2d, 3: build_system_3d}.get(len(desc["dims"]))
    if build is None:
        raise FormatError(f"unsupported dimensionality {len(desc['dims'])}")
    return build(desc["dims"], profile, match[0], qmf, desc["full_system"], workers=workers)
