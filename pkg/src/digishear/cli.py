"""Command-line interface.

Every subcommand prints one machine-readable line of ``key=value`` pairs
followed by a short human-readable summary.  Exit status is 0 on success,
1 on usage errors and 2 on data errors (missing or malformed files).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np
from scipy import fft

from . import apps, io
from .errors import ShearletError
from .filters import ScaleProfile, alpha_to_shear_levels
from .system2d import build_isotropic_system_2d, build_system_2d
from .system3d import build_system_3d
from .transform import forward, inverse, load_coefficients, save_coefficients

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    """Invalid combination of command-line options."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _size(text: str) -> tuple:
    try:
        dims = tuple(int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a size like 512x512, got {text!r}")
    if len(dims) not in (2, 3) or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"expected 2 or 3 positive dimensions, got {text!r}")
    return dims


def _add_profile(p):
    g = p.add_argument_group("system profile")
    g.add_argument("--scales", type=int, help="number of scales (default: length of --shear-levels, else 4)")
    g.add_argument("--shear-levels", type=_int_list, help="comma-separated d_j, coarse to fine")
    g.add_argument("--alpha", type=_float_list, help="anisotropy per scale in (0,2), instead of --shear-levels")
    g.add_argument("--j0", type=int, default=0, help="coarsest scale offset (default 0)")
    g.add_argument("--full-system", action="store_true", help="keep the boundary filters")


def _add_common(p):
    p.add_argument("--threads", type=int, default=os.cpu_count(), help="FFT worker threads")


def _resolve_profile(args, ndim: int) -> ScaleProfile:
    if args.shear_levels is not None and args.alpha is not None:
        raise UsageError("--shear-levels and --alpha are mutually exclusive")
    if args.j0 < 0:
        raise UsageError("--j0 must be nonnegative")
    n = args.scales
    if args.shear_levels is not None:
        levels = args.shear_levels
        if n is not None and n != len(levels):
            raise UsageError(f"--scales {n} disagrees with {len(levels)} shear levels")
    else:
        n = 4 if n is None and ndim == 2 else (3 if n is None else n)
        if n < 0:
            raise UsageError("--scales must be nonnegative")
        if args.alpha is not None:
            alpha = args.alpha if len(args.alpha) > 1 else args.alpha * n
            if len(alpha) != n:
                raise UsageError(f"{len(alpha)} alpha values for {n} scales")
            try:
                levels = alpha_to_shear_levels(alpha, range(args.j0 + 1, args.j0 + n + 1))
            except ShearletError as exc:
                raise UsageError(str(exc)) from exc
        else:
            levels = ScaleProfile.parabolic(n).shear_levels
    if any(d < 0 for d in levels):
        raise UsageError("shear levels must be nonnegative")
    return ScaleProfile(levels, args.j0)


def _build(shape, profile, args):
    if any(s < 8 for s in shape):
        raise UsageError(f"grid {shape} is smaller than 8 along some axis")
    builder = build_system_2d if len(shape) == 2 else build_system_3d
    return builder(shape, profile, full_system=args.full_system, workers=args.threads)


def _system_for(shape, args):
    if getattr(args, "system", None):
        desc = io.read_descriptor(args.system)
        if tuple(desc["dims"]) != tuple(shape):
            raise ShearletError(f"descriptor grid {desc['dims']} differs from data {shape}")
        return io.system_from_descriptor(desc, workers=args.threads)
    return _build(shape, _resolve_profile(args, len(shape)), args)


def _emit(metrics: dict, summary: str):
    def fmt(v):
        if isinstance(v, float):
            return "inf" if np.isinf(v) else f"{v:.6g}"
        return str(v)

    print(" ".join(f"{k}={fmt(v)}" for k, v in metrics.items()))
    print(summary)


def _require_file(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(path)


def cmd_system(args):
    profile = _resolve_profile(args, len(args.size))
    t = time.perf_counter()
    system = _build(args.size, profile, args)
    A, B = system.frame_bounds()
    io.write_descriptor(args.out, system)
    _emit(
        {"filters": len(system), "A": A, "B": B, "ratio": B / A, "time": time.perf_counter() - t},
        f"wrote descriptor of a {len(system)}-filter system on {args.size} to {args.out}",
    )


def cmd_frame_bounds(args):
    profile = _resolve_profile(args, len(args.size))
    t = time.perf_counter()
    system = _build(args.size, profile, args)
    A, B = system.frame_bounds()
    _emit(
        {"filters": len(system), "A": A, "B": B, "ratio": B / A, "time": time.perf_counter() - t},
        f"frame bounds of shear levels {profile.shear_levels} on {args.size}: "
        f"A={A:.4f}, B={B:.4f}, B/A={B / A:.2f}",
    )


def cmd_decompose(args):
    if not args.system:
        _resolve_profile(args, 2)  # validate flags before reading data
    _require_file(args.input)
    f, _ = io.read_signal(args.input)
    t = time.perf_counter()
    system = _system_for(f.shape, args)
    coeffs = forward(f, system, args.threads)
    save_coefficients(args.out, coeffs)
    if args.descriptor_out:
        io.write_descriptor(args.descriptor_out, system)
    _emit(
        {"bands": len(coeffs), "time": time.perf_counter() - t},
        f"wrote {len(coeffs)} bands of shape {f.shape} to {args.out}",
    )


def _profile_from_indices(indices, ndim):
    """Shear levels, j0 and the full-system flag implied by a coefficient index table."""
    levels = {}
    for ix in indices:
        if ix.kind == "lowpass":
            continue
        k = abs(ix.shear) if ndim == 2 else max(abs(v) for v in ix.shears)
        levels[ix.scale] = max(levels.get(ix.scale, 0), k)
    if not levels:
        return ScaleProfile(()), False
    scales = sorted(levels)
    d = tuple(int(np.log2(levels[j])) if levels[j] else 0 for j in scales)
    profile = ScaleProfile(d, scales[0])
    return profile, None


def cmd_reconstruct(args):
    _require_file(args.input)
    coeffs = load_coefficients(args.input)
    ndim = coeffs.bands.ndim - 1
    t = time.perf_counter()
    if args.system:
        desc = io.read_descriptor(args.system)
        system = io.system_from_descriptor(desc, workers=args.threads)
    else:
        profile, _ = _profile_from_indices(coeffs.indices, ndim)
        system = None
        for full in (False, True):
            builder = build_system_2d if ndim == 2 else build_system_3d
            candidate = builder(coeffs.shape, profile, full_system=full, workers=args.threads)
            if candidate.indices == coeffs.indices:
                system = candidate
                break
        if system is None:
            raise ShearletError("coefficient index table matches no default system; pass --system")
    f = inverse(coeffs, system, args.threads)
    metrics = {"time": time.perf_counter() - t}
    if args.reference:
        _require_file(args.reference)
        ref, _ = io.read_signal(args.reference)
        metrics["max_abs_diff"] = float(np.max(np.abs(ref - f)))
    io.write_signal(args.out, f, args.maxval)
    _emit(metrics, f"reconstructed {f.shape} signal written to {args.out}")


def _default_k(ndim, n_scales):
    base = apps.DEFAULT_K_2D if ndim == 2 else apps.DEFAULT_K_3D
    if n_scales == len(base):
        return base
    return tuple([base[0]] * (n_scales - 1) + [base[-1]])[-n_scales:] if n_scales else ()


def cmd_denoise(args):
    if args.sigma < 0:
        raise UsageError("--sigma must be nonnegative")
    if not args.system:
        _resolve_profile(args, 2)
    _require_file(args.input)
    f, maxval = io.read_signal(args.input)
    system = _system_for(f.shape, args)
    n = system.profile.n_scales
    K = args.K if args.K is not None else _default_k(f.ndim, n)
    if len(K) != n:
        raise UsageError(f"--K has {len(K)} entries for {n} scales")
    t = time.perf_counter()
    noisy = f if args.noisy else apps.add_gaussian_noise(f, args.sigma, args.seed)
    schedule = apps.ThresholdSchedule(K, args.sigma)
    out = apps.denoise(noisy, system, schedule, scale_by_norm=not args.strict, workers=args.threads)
    metrics = {}
    if not args.noisy:
        metrics["psnr_noisy"] = apps.psnr(f, noisy)
        metrics["psnr_denoised"] = apps.psnr(f, out)
    metrics["time"] = time.perf_counter() - t
    if args.noisy_out:
        io.write_signal(args.noisy_out, noisy, maxval)
    io.write_signal(args.out, out, maxval)
    _emit(metrics, f"denoised {f.shape} signal (sigma={args.sigma}) written to {args.out}")


def _iter_config(args, cls):
    try:
        delta_init = "auto" if args.delta_init is None else args.delta_init
        return cls(args.iterations, delta_init, args.delta_min)
    except ShearletError as exc:
        raise UsageError(str(exc)) from exc


def cmd_inpaint(args):
    config = _iter_config(args, apps.InpaintConfig)
    if (args.mask is None) == (args.observed is None):
        raise UsageError("give exactly one of --mask and --observed")
    if not args.system:
        _resolve_profile(args, 2)
    _require_file(args.input)
    f, maxval = io.read_signal(args.input)
    if args.mask is not None:
        _require_file(args.mask)
        mask, _ = io.read_signal(args.mask)
        if mask.shape != f.shape:
            raise ShearletError(f"mask shape {mask.shape} differs from input {f.shape}")
        mask = (mask > 0).astype(float)
    else:
        mask = apps.random_mask(f.shape, args.observed, args.seed)
    system = _system_for(f.shape, args)
    t = time.perf_counter()
    masked = f * mask
    out = apps.inpaint(masked, mask, system, config, workers=args.threads)
    metrics = {
        "psnr_masked": apps.psnr(f, masked),
        "psnr_inpainted": apps.psnr(f, out),
        "time": time.perf_counter() - t,
    }
    if args.masked_out:
        io.write_signal(args.masked_out, masked, maxval)
    io.write_signal(args.out, out, maxval)
    _emit(metrics, f"inpainted {f.shape} signal written to {args.out}")


def cmd_separate(args):
    config = _iter_config(args, apps.SeparationConfig)
    profile = _resolve_profile(args, 2)
    _require_file(args.input)
    truths = {}
    for key, path in (("curves", args.truth_curves), ("points", args.truth_points)):
        if path:
            _require_file(path)
            truths[key] = (io.read_signal(path)[0] > 0).astype(float)
    f, maxval = io.read_signal(args.input)
    if f.ndim != 2:
        raise ShearletError("separation needs a 2D image")
    t = time.perf_counter()
    directional = _build(f.shape, profile, args)
    isotropic = build_isotropic_system_2d(f.shape, profile.n_scales, j0=profile.j0, workers=args.threads)
    res = apps.separate(f, directional, isotropic, config, workers=args.threads)
    metrics = {}
    for key, part in (("curves", res.curvilinear), ("points", res.blobs)):
        if key in truths:
            q, delta = apps.quality_q_opt(part, truths[key])
            metrics[f"q_opt_{key}"] = q
            metrics[f"delta_{key}"] = delta
    metrics["time"] = time.perf_counter() - t
    io.write_signal(args.out_curves, res.curvilinear, maxval)
    io.write_signal(args.out_blobs, res.blobs, maxval)
    _emit(metrics, f"wrote curvilinear part to {args.out_curves} and blobs to {args.out_blobs}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="digishear", description="Digital shearlet transforms and restoration pipelines.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("system", help="build a system and write its descriptor")
    p.add_argument("--size", type=_size, required=True, help="grid size, e.g. 512x512 or 64x64x64")
    p.add_argument("--out", required=True, help="descriptor file to write")
    _add_profile(p)
    _add_common(p)
    p.set_defaults(func=cmd_system)

    p = sub.add_parser("frame-bounds", help="print frame bounds of a system")
    p.add_argument("--size", type=_size, required=True)
    _add_profile(p)
    _add_common(p)
    p.set_defaults(func=cmd_frame_bounds)

    p = sub.add_parser("decompose", help="forward transform of a PGM or SVOL file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="SHCF coefficient file")
    p.add_argument("--system", help="descriptor file; overrides the profile flags")
    p.add_argument("--descriptor-out", help="also write the system descriptor here")
    _add_profile(p)
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="inverse transform of an SHCF file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="PGM or .svol output")
    p.add_argument("--system", help="descriptor file (default: infer from the index table)")
    p.add_argument("--reference", help="report the max-abs difference to this signal")
    p.add_argument("--maxval", type=int, default=255, help="PGM maximum gray value")
    _add_common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("denoise", help="add seeded noise (unless --noisy) and denoise")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma", type=float, required=True, help="noise standard deviation")
    p.add_argument("--K", type=_float_list, help="per-scale threshold factors, coarse to fine")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noisy", action="store_true", help="input is already noisy; add nothing")
    p.add_argument("--noisy-out", help="write the noisy input here")
    p.add_argument("--strict", action="store_true", help="do not scale thresholds by filter norms")
    p.add_argument("--system", help="descriptor file; overrides the profile flags")
    _add_profile(p)
    _add_common(p)
    p.set_defaults(func=cmd_denoise)

    for name, func, help_text in (
        ("inpaint", cmd_inpaint, "mask an image and fill the gaps"),
        ("separate", cmd_separate, "split an image into curves and blobs"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--iterations", type=int, default=100)
        p.add_argument("--delta-init", type=float, help="first threshold (default: automatic)")
        p.add_argument("--delta-min", type=float, default=0.01, help="final threshold relative to the first")
        _add_profile(p)
        _add_common(p)
        p.set_defaults(func=func)
        if name == "inpaint":
            p.add_argument("--out", required=True)
            p.add_argument("--mask", help="PGM/SVOL mask, nonzero = observed")
            p.add_argument("--observed", type=float, help="random mask keeping this fraction")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--masked-out", help="write the masked input here")
            p.add_argument("--system", help="descriptor file; overrides the profile flags")
        else:
            p.add_argument("--out-curves", required=True)
            p.add_argument("--out-blobs", required=True)
            p.add_argument("--truth-curves", help="binary PGM of the true curves, for Q_opt")
            p.add_argument("--truth-points", help="binary PGM of the true points, for Q_opt")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        with fft.set_workers(args.threads or 1):
            args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except FileNotFoundError as exc:
        print(f"digishear: error: no such file: {exc.filename or exc}", file=sys.stderr)
        return EXIT_DATA
    except (ShearletError, OSError) as exc:
        print(f"digishear: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
