"""Deterministic synthetic test images.

Both generators are closed-form, so the same call always returns the same
array on every platform.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["cartoon", "curves_and_points", "SeparationPhantom"]


def _grid(n: int):
    y, x = np.mgrid[0:n, 0:n].astype(float)
    return y / n, x / n  # coordinates in [0, 1)


def cartoon(n: int = 256) -> np.ndarray:
    """Piecewise-constant image with curved and straight edges, gray values in [0, 255].

    Parameters
    ----------
    n : int
        Side length of the square image.
    """
    y, x = _grid(n)
    img = np.full((n, n), 40.0)
    # wavy horizon splitting the background
    img[y > 0.62 + 0.06 * np.sin(2 * np.pi * 1.5 * x)] = 90.0
    # large tilted ellipse
    c, s = np.cos(0.5), np.sin(0.5)
    u = (x - 0.38) * c + (y - 0.36) * s
    v = -(x - 0.38) * s + (y - 0.36) * c
    img[(u / 0.27) ** 2 + (v / 0.15) ** 2 < 1] = 200.0
    # ring
    r = np.hypot(x - 0.72, y - 0.7)
    img[(r > 0.1) & (r < 0.17)] = 150.0
    # rotated square
    c, s = np.cos(0.3), np.sin(0.3)
    u = (x - 0.75) * c + (y - 0.25) * s
    v = -(x - 0.75) * s + (y - 0.25) * c
    img[(np.abs(u) < 0.11) & (np.abs(v) < 0.11)] = 240.0
    # small disk inside the ellipse and a triangle at the bottom left
    img[np.hypot(x - 0.33, y - 0.33) < 0.06] = 110.0
    img[(y > 0.7) & (y < 0.92) & (np.abs(x - 0.2) < (y - 0.7) * 0.7)] = 170.0
    return img


class SeparationPhantom(NamedTuple):
    """A curves-plus-points image together with its binary parts."""

    image: np.ndarray
    curves: np.ndarray
    points: np.ndarray


def curves_and_points(n: int = 256) -> SeparationPhantom:
    """Thin curves plus small disks, each part binary, image values in {0, 255}.

    ``image = 255 * (curves + points)``; the two parts do not overlap.
    """
    y, x = _grid(n)
    px = 1.0 / n
    width = 0.7 * px
    curves = np.zeros((n, n), dtype=bool)
    for cx, cy, rad in [(0.5, 0.5, 0.3), (0.3, 0.32, 0.16), (0.72, 0.68, 0.12)]:
        curves |= np.abs(np.hypot(x - cx, y - cy) - rad) < width
    curves |= np.abs(y - (0.86 + 0.05 * np.sin(2 * np.pi * 2 * x))) < width
    curves |= np.abs((x - 0.1) - 0.35 * (y - 0.05)) < width * np.hypot(1, 0.35)

    points = np.zeros((n, n), dtype=bool)
    rng = np.random.default_rng(20131231)
    centers = []
    while len(centers) < 40:
        c = rng.uniform(0.04, 0.96, size=2)
        if any(np.hypot(*(c - o)) < 0.06 for o in centers):
            continue
        disk = np.hypot(x - c[1], y - c[0]) < 2.2 * px
        grown = np.hypot(x - c[1], y - c[0]) < 5 * px
        if np.any(grown & curves):
            continue
        centers.append(c)
        points |= disk
    curves = curves.astype(float)
    points = points.astype(float)
    return SeparationPhantom(255.0 * (curves + points), curves, points)
