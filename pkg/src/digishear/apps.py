"""Restoration pipelines: denoising, inpainting and geometric separation.

Thresholds are applied per band.  Coefficients of a band with filter
``psi_i`` carry noise of standard deviation ``sigma * ||psi_i||_2``, so by
default every threshold is multiplied by the filter's spatial l2 norm;
``scale_by_norm=False`` reproduces the plain per-scale rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import fft

from .errors import ConfigError, DegenerateInputError, DomainError, ShapeError
from .filters import Taps
from .transform import CoefficientStack, forward, inverse

__all__ = [
    "ThresholdSchedule",
    "InpaintConfig",
    "SeparationConfig",
    "SeparationResult",
    "DEFAULT_K_2D",
    "DEFAULT_K_3D",
    "add_gaussian_noise",
    "random_mask",
    "hard_threshold",
    "threshold_bands",
    "denoise",
    "psnr",
    "inpaint",
    "separate",
    "binarize",
    "gaussian_kernel",
    "quality_q",
    "quality_q_opt",
]

DEFAULT_K_2D = (2.5, 2.5, 2.5, 3.8)
DEFAULT_K_3D = (3.0, 3.0, 4.0)


@dataclass(frozen=True)
class ThresholdSchedule:
    """Per-scale factors ``K_j`` (coarse to fine) and the noise level ``sigma``."""

    per_scale_factors: tuple
    sigma: float

    def __post_init__(self):
        factors = tuple(float(k) for k in self.per_scale_factors)
        if any(k <= 0 for k in factors):
            raise ConfigError("threshold factors must be positive")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        object.__setattr__(self, "per_scale_factors", factors)


@dataclass(frozen=True)
class InpaintConfig:
    """Iterative thresholding parameters.

    Attributes
    ----------
    iterations : int
        Number of iterations, at least 2.
    delta_init : float or "auto"
        First threshold; ``"auto"`` uses the largest normalized coefficient
        magnitude of the input.
    delta_min : float
        Final threshold as a fraction of ``delta_init``, in (0, 1).
    """

    iterations: int = 100
    delta_init: float | str = "auto"
    delta_min: float = 0.01

    def __post_init__(self):
        if int(self.iterations) < 2:
            raise ConfigError("at least two iterations are required")
        if not 0 < self.delta_min < 1:
            raise ConfigError("delta_min must lie in (0, 1)")
        if self.delta_init != "auto" and not float(self.delta_init) > 0:
            raise ConfigError("delta_init must be positive or 'auto'")

    @property
    def decay(self) -> float:
        """``lambda = delta_min ** (1 / (iterations - 1))``."""
        return self.delta_min ** (1.0 / (self.iterations - 1))

    def thresholds(self, delta_init: float) -> np.ndarray:
        """Threshold used in every iteration."""
        return delta_init * self.decay ** np.arange(self.iterations)


class SeparationConfig(InpaintConfig):
    """Parameters of the separation iteration; same fields as :class:`InpaintConfig`."""


class SeparationResult(NamedTuple):
    curvilinear: np.ndarray
    blobs: np.ndarray


def add_gaussian_noise(signal, sigma: float, seed: int | None = None) -> np.ndarray:
    """Add i.i.d. ``N(0, sigma**2)`` noise.

    Samples come from NumPy's ``PCG64`` bit generator turned into normals by
    ``Generator.standard_normal`` (ziggurat), so a seed reproduces the same
    noise on every platform.
    """
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    f = np.array(signal, dtype=float)
    if sigma == 0:
        return f
    rng = np.random.Generator(np.random.PCG64(seed))
    return f + sigma * rng.standard_normal(f.shape)


def random_mask(shape, observed_fraction: float, seed: int | None = None) -> np.ndarray:
    """Binary mask with ``observed_fraction`` of the samples set to one, chosen uniformly."""
    if not 0 <= observed_fraction <= 1:
        raise DomainError("observed fraction must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(np.prod(shape))
    mask = np.zeros(n)
    mask[rng.permutation(n)[: int(round(observed_fraction * n))]] = 1.0
    return mask.reshape(shape)


def _is_lowpass(index) -> bool:
    return index.kind == "lowpass"


def threshold_bands(coeffs: CoefficientStack, deltas: Sequence[float]) -> CoefficientStack:
    """Zero every coefficient of band ``i`` with ``|x| < deltas[i]``."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != (len(coeffs),):
        raise ConfigError("one threshold per band is required")
    shape = (-1,) + (1,) * (coeffs.bands.ndim - 1)
    keep = np.abs(coeffs.bands) >= deltas.reshape(shape)
    return coeffs.with_bands(np.where(keep, coeffs.bands, 0.0))


def _band_deltas(system, per_band_scale, scale_by_norm) -> np.ndarray:
    norms = system.filter_norms if scale_by_norm else np.ones(len(system))
    return np.asarray(per_band_scale) * norms


def hard_threshold(
    coeffs: CoefficientStack,
    schedule: ThresholdSchedule,
    system,
    scale_by_norm: bool = True,
) -> CoefficientStack:
    """Hard thresholding with ``delta_i = K_j * sigma * ||psi_i||_2``; the lowpass is kept.

    Raises
    ------
    ConfigError
        If the schedule does not have one factor per scale.
    """
    factors = schedule.per_scale_factors
    if len(factors) != system.profile.n_scales:
        raise ConfigError(
            f"{len(factors)} threshold factors for {system.profile.n_scales} scales"
        )
    if len(coeffs) != len(system):
        raise ShapeError("coefficient stack does not belong to this system")
    j0 = system.profile.j0
    k = np.array([0.0 if _is_lowpass(ix) else factors[ix.scale - j0] for ix in system.indices])
    return threshold_bands(coeffs, _band_deltas(system, k * schedule.sigma, scale_by_norm))


def denoise(signal, system, schedule: ThresholdSchedule, scale_by_norm: bool = True, workers=None):
    """Forward transform, hard threshold, inverse transform."""
    c = forward(signal, system, workers)
    return inverse(hard_threshold(c, schedule, system, scale_by_norm), system, workers)


def psnr(reference, test) -> float:
    """``20 log10(255 sqrt(N) / ||reference - test||_F)``; ``inf`` for identical inputs."""
    a = np.asarray(reference, dtype=float)
    b = np.asarray(test, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"shapes {a.shape} and {b.shape} differ")
    err = np.linalg.norm((a - b).ravel())
    if err == 0:
        return float("inf")
    return float(20 * np.log10(255 * np.sqrt(a.size) / err))


class _Thresholder:
    """Iteration-invariant part of ``T^{-1} T_delta T`` for one system."""

    def __init__(self, system, scale_by_norm, threshold_lowpass, workers):
        self.system = system
        self.workers = workers
        lowpass = np.array([_is_lowpass(ix) for ix in system.indices])
        self.weights = _band_deltas(system, np.ones(len(system)), scale_by_norm)
        if not threshold_lowpass:
            self.weights = np.where(lowpass, 0.0, self.weights)

    def max_normalized(self, f) -> float:
        c = forward(f, self.system, self.workers).bands
        w = np.where(self.weights > 0, self.weights, np.inf)
        return float(max(np.abs(b).max() / wi for b, wi in zip(c, w)))

    def __call__(self, f, delta):
        c = forward(f, self.system, self.workers)
        return inverse(threshold_bands(c, delta * self.weights), self.system, self.workers)


def _delta_init(config, value) -> float:
    return value() if config.delta_init == "auto" else float(config.delta_init)


def inpaint(
    masked_signal,
    mask,
    system,
    config: InpaintConfig = InpaintConfig(),
    *,
    scale_by_norm: bool = True,
    threshold_lowpass: bool = True,
    callback: Callable | None = None,
    workers=None,
) -> np.ndarray:
    """Fill in unobserved samples by iterative hard thresholding.

    Each iteration forms the residual on the observed samples, adds the
    current estimate, thresholds its coefficients at the current ``delta``
    and synthesizes; ``delta`` then decays geometrically to
    ``delta_min * delta_init``.

    Parameters
    ----------
    masked_signal : array_like
        Observed data, zero where ``mask`` is zero.
    mask : array_like
        Binary array, one on observed samples.
    system : ShearletSystem2D or ShearletSystem3D
    config : InpaintConfig
    callback : callable, optional
        Called as ``callback(i, delta, residual, estimate)`` after each
        iteration, where ``residual`` is the one used in that iteration.

    Raises
    ------
    DegenerateInputError
        If nothing is observed.
    """
    f = np.asarray(masked_signal, dtype=float)
    m = np.asarray(mask, dtype=float)
    if f.shape != m.shape or f.shape != system.shape:
        raise ShapeError("signal, mask and system shapes must agree")
    if not np.all((m == 0) | (m == 1)):
        raise DomainError("mask must be binary")
    if not m.any():
        raise DegenerateInputError("mask observes no samples")
    op = _Thresholder(system, scale_by_norm, threshold_lowpass, workers)
    delta = _delta_init(config, lambda: op.max_normalized(f * m))
    est = np.zeros_like(f)
    for i, d in enumerate(config.thresholds(delta)):
        res = m * (f - est)
        est = op(res + est, d)
        if callback is not None:
            callback(i, d, res, est)
    return est


def separate(
    signal,
    directional_system,
    isotropic_system,
    config: SeparationConfig = SeparationConfig(),
    *,
    scale_by_norm: bool = True,
    threshold_lowpass: bool = True,
    workers=None,
) -> SeparationResult:
    """Split an image into curvilinear and blob-like parts.

    Both parts are updated from the same residual ``f - (f0 + f1)`` in each
    iteration, ``f0`` with the directional system and ``f1`` with the
    isotropic one, under a common decaying threshold.
    """
    f = np.asarray(signal, dtype=float)
    if f.shape != directional_system.shape or f.shape != isotropic_system.shape:
        raise ShapeError("signal and system shapes must agree")
    op0 = _Thresholder(directional_system, scale_by_norm, threshold_lowpass, workers)
    op1 = _Thresholder(isotropic_system, scale_by_norm, threshold_lowpass, workers)
    delta = _delta_init(config, lambda: max(op0.max_normalized(f), op1.max_normalized(f)))
    f0 = np.zeros_like(f)
    f1 = np.zeros_like(f)
    if delta == 0:
        return SeparationResult(f0, f1)
    for d in config.thresholds(delta):
        res = f - (f0 + f1)
        f0 = op0(res + f0, d)
        f1 = op1(res + f1, d)
    return SeparationResult(f0, f1)


def binarize(signal, delta: float) -> np.ndarray:
    """``1`` where ``|g| >= delta``, else ``0``."""
    return (np.abs(np.asarray(signal, dtype=float)) >= delta).astype(float)


def gaussian_kernel(sigma: float = 2.0, truncate: float = 4.0) -> Taps:
    """Sampled 2D Gaussian, truncated at ``truncate * sigma`` and normalized to unit sum."""
    r = int(np.ceil(truncate * sigma))
    t = np.arange(-r, r + 1)
    g = np.exp(-0.5 * (t / sigma) ** 2)
    k = np.outer(g, g)
    return Taps(k / k.sum(), (r, r))


class _Blur:
    def __init__(self, kernel: Taps, shape):
        self.shape = shape
        self.spec = fft.rfft2(kernel.periodize(shape))

    def __call__(self, f):
        return fft.irfft2(fft.rfft2(f) * self.spec, s=self.shape)


def _check_truth(recovered, truth):
    rec = np.asarray(recovered, dtype=float)
    t = np.asarray(truth, dtype=float)
    if rec.shape != t.shape:
        raise ShapeError("recovered and truth shapes differ")
    if not np.all((t == 0) | (t == 1)):
        raise DomainError("truth must be a binary image")
    if not t.any():
        raise DegenerateInputError("truth image has no energy")
    return rec, t


def quality_q(recovered, truth, delta: float, kernel: Taps | None = None) -> float:
    """``||g * f0 - g * B_delta(f0~)|| / ||g * f0||`` with periodic convolution."""
    rec, t = _check_truth(recovered, truth)
    blur = _Blur(kernel or gaussian_kernel(), t.shape)
    ref = blur(t)
    return float(np.linalg.norm(ref - blur(binarize(rec, delta))) / np.linalg.norm(ref))


def quality_q_opt(recovered, truth, kernel: Taps | None = None) -> tuple:
    """Minimum of :func:`quality_q` over ``delta = 0, 1, ..., 255``.

    Returns
    -------
    (float, int)
        The minimum and the smallest ``delta`` attaining it.
    """
    rec, t = _check_truth(recovered, truth)
    blur = _Blur(kernel or gaussian_kernel(), t.shape)
    ref = blur(t)
    norm = np.linalg.norm(ref)
    mag = np.abs(rec)
    best, best_delta, last_count, q = np.inf, 0, -1, np.inf
    for delta in range(256):
        count = int(np.count_nonzero(mag >= delta))
        # B_delta only changes when a sample crosses the level
        if count != last_count:
            q = float(np.linalg.norm(ref - blur((mag >= delta).astype(float))) / norm)
            last_count = count
        if q < best:
            best, best_delta = q, delta
    return best, best_delta
