"""Shared storage and diagnostics for 2D and 3D shearlet systems.

Spatial filters are real, so only the half spectrum produced by
:func:`scipy.fft.rfftn` is stored: the last axis keeps ``n // 2 + 1``
frequencies.  Full spectra are rebuilt on demand by Hermitian extension.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import fft

from .errors import ShapeError, SingularFrameError

SINGULAR_TOL = 1e-12


def half_weights(shape) -> np.ndarray:
    """Multiplicity of every half-spectrum column in the full spectrum."""
    n = shape[-1]
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return w


def hermitian_expand(half: np.ndarray, shape) -> np.ndarray:
    """Full spectrum of a real signal from its ``rfftn`` half spectrum."""
    shape = tuple(shape)
    n = shape[-1]
    full = np.empty(half.shape[: half.ndim - len(shape)] + shape, dtype=half.dtype)
    m = half.shape[-1]
    full[..., :m] = half
    if n - m > 0:
        # X(-xi) = conj(X(xi)); index -xi along the leading axes is (-i) mod size
        rev = half
        for ax in range(-len(shape), -1):
            rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
        tail = np.conj(rev[..., 1 : n - m + 1][..., ::-1])
        full[..., m:] = tail
    return full


class ShearletSystemBase:
    """Frequency-domain filter bank with frame weight and dual filters.

    Attributes
    ----------
    shape : tuple of int
        Grid size.
    indices : list
        One index record per filter, in band order.
    spectra : ndarray, complex, shape ``(R,) + shape[:-1] + (shape[-1] // 2 + 1,)``
        Half spectra of the filters.
    """

    def __init__(self, shape, indices, spectra, taps_factory):
        self.shape = tuple(int(s) for s in shape)
        self.indices = list(indices)
        self.spectra = spectra
        self.spectra.setflags(write=False)
        self._taps_factory = taps_factory
        if len(self.indices) != spectra.shape[0]:
            raise ShapeError("index table and spectra disagree in length")
        if self.frame_bounds()[0] < SINGULAR_TOL:
            raise SingularFrameError(
                f"frame weight minimum {self.frame_bounds()[0]:.3g} is below {SINGULAR_TOL}"
            )

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def redundancy(self) -> int:
        return len(self.indices)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @cached_property
    def frame_weight_half(self) -> np.ndarray:
        w = np.zeros(self.spectra.shape[1:])
        for s in self.spectra:
            w += s.real**2 + s.imag**2
        w.setflags(write=False)
        return w

    @cached_property
    def frame_weight(self) -> np.ndarray:
        """``sum_i |psi_hat_i|**2`` on the full frequency grid (lowpass included)."""
        w = hermitian_expand(self.frame_weight_half, self.shape).real
        w.setflags(write=False)
        return w

    def frame_bounds(self) -> tuple:
        """``(A, B)``: minimum and maximum of the frame weight."""
        w = self.frame_weight_half
        return float(w.min()), float(w.max())

    def duals(self) -> np.ndarray:
        """Half spectra of the dual filters ``psi_hat / Psi``."""
        return self.spectra / self.frame_weight_half

    def dual(self, i: int) -> np.ndarray:
        return self.spectra[i] / self.frame_weight_half

    def filter_spectrum(self, i: int) -> np.ndarray:
        """Full complex spectrum of filter ``i``."""
        return hermitian_expand(self.spectra[i], self.shape)

    def filter_taps(self, i: int):
        """Finite spatial taps of filter ``i`` (before periodization)."""
        return self._taps_factory(self.indices[i])

    @cached_property
    def filter_norms(self) -> np.ndarray:
        """Spatial l2 norm of every periodized filter."""
        w = half_weights(self.shape)
        n = float(np.prod(self.shape))
        e = (np.abs(self.spectra) ** 2 * w).reshape(len(self), -1).sum(axis=1)
        norms = np.sqrt(e / n)
        norms.setflags(write=False)
        return norms

    def spatial_filter(self, i: int) -> np.ndarray:
        """Filter ``i`` periodized on the grid, origin at index 0."""
        return fft.irfftn(self.spectra[i], s=self.shape)
