"""Regenerate the shipped maximally flat fan filter asset.

The filter is built from scratch with numpy only:

1. a 1D maximally flat prototype with five taps,
2. the 9x9 maximally flat diamond kernel of order 4 as McClellan variable,
3. Chebyshev recursion to map the prototype onto the 2D kernel,
4. unit-sum normalization and modulation by (-1)**n along axis 0.

Usage::

    python3 tools/make_fan_filter.py [output-path]

Without an argument the text is written to stdout; the sha256 of the
written bytes is printed to stderr.
"""

import hashlib
import sys

import numpy as np
from scipy.signal import convolve2d


def diamond_kernel():
    """Order-4 maximally flat McClellan kernel (9x9, center zero)."""
    quarter = np.array(
        [
            [0, -5, 0, -3, 0],
            [-5, 0, 52, 0, 34],
            [0, 52, 0, -276, 0],
            [-3, 0, -276, 0, 1454],
            [0, 34, 0, 1454, 0],
        ],
        dtype=float,
    ) / 2**12
    half = np.concatenate([quarter, np.fliplr(quarter[:, :-1])], axis=1)
    return np.concatenate([half, np.flipud(half[:-1])], axis=0)


def prototype():
    """Five-tap zero-phase 1D prototype."""
    m1 = 1 / np.sqrt(2)
    k2 = m1
    k3 = 1 - np.sqrt(2)
    b = np.array([0.25 * k2 * k3, 0.5 * k2, 1 + 0.5 * k2 * k3]) * m1
    return np.concatenate([b, b[-2::-1]])


def _add_centered(dst, src, scale=1.0):
    r = (dst.shape[0] - src.shape[0]) // 2
    c = (dst.shape[1] - src.shape[1]) // 2
    dst[r : r + src.shape[0], c : c + src.shape[1]] += scale * src


def mcclellan(b, t):
    """2D filter whose response is B(cos w) with cos w replaced by T(w1, w2)."""
    n = (len(b) - 1) // 2
    c = b[n:]
    a = np.concatenate([c[:1], 2 * c[1:]])
    cheb = [np.ones((1, 1)), t]
    for _ in range(2, n + 1):
        nxt = 2 * convolve2d(t, cheb[-1])
        _add_centered(nxt, cheb[-2], -1.0)
        cheb.append(nxt)
    out = np.zeros_like(cheb[-1])
    for ai, ti in zip(a, cheb):
        _add_centered(out, ti, ai)
    return out


def fan_filter():
    h0 = mcclellan(prototype(), diamond_kernel())
    h0 = h0 / h0.sum()
    n = np.arange(h0.shape[0]) - h0.shape[0] // 2
    fan = h0 * np.where(n % 2 == 0, 1.0, -1.0)[:, None]
    return np.where(fan == 0, 0.0, fan)  # no negative zeros in the text


def render(taps):
    rows, cols = taps.shape
    lines = [f"{rows} {cols} {rows // 2} {cols // 2}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in taps]
    return "\n".join(lines) + "\n"


def main(argv):
    text = render(fan_filter())
    if len(argv) > 1:
        with open(argv[1], "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(hashlib.sha256(text.encode()).hexdigest(), file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv)
