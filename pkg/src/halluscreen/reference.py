"""Straight-line reference implementation of the Structure Discrepancy.

Every stage is written as explicit per-pixel loops with no shared code from
:mod:`halluscreen.sd_core`, so it can serve as an independent check of the
vectorized path. It is slow (O(H * W * K^2)) and meant for verification only.
"""

from __future__ import annotations

import math

import numpy as np

SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))
SOBEL_Y = ((-1.0, -2.0, -1.0), (0.0, 0.0, 0.0), (1.0, 2.0, 1.0))


def _clamped(i, n):
    return min(max(i, 0), n - 1)


def naive_sobel(img) -> np.ndarray:
    x = np.asarray(img, dtype=np.float64)
    h, w = x.shape
    out = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            gx = gy = 0.0
            for dr in range(3):
                for dc in range(3):
                    v = x[_clamped(r + dr - 1, h), _clamped(c + dc - 1, w)]
                    gx += SOBEL_X[dr][dc] * v
                    gy += SOBEL_Y[dr][dc] * v
            out[r, c] = math.sqrt(gx * gx + gy * gy)
    return out


def naive_box_smooth(raster, kernel_size: int) -> np.ndarray:
    """Sliding-window mean, one window sum per output pixel."""
    x = np.asarray(raster, dtype=np.float64)
    h, w = x.shape
    k = int(kernel_size)
    before = k // 2
    after = k - 1 - before
    padded = np.pad(x, ((before, after), (before, after)), mode="edge")
    out = np.empty((h, w))
    for r in range(h):
        for c in range(w):
            out[r, c] = padded[r:r + k, c:c + k].sum() / (k * k)
    return out


def reference_sd_map(a, b, m_threshold=0.2, p_threshold=0.1, kernel_size=32,
                     clamp_structure=False, scale=100.0) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sa = naive_box_smooth(naive_sobel(a), kernel_size)
    sb = naive_box_smooth(naive_sobel(b), kernel_size)
    diff = naive_box_smooth(np.abs(a - b), kernel_size)
    h, w = a.shape
    out = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            x, y = sa[r, c], sb[r, c]
            y_over = y / m_threshold
            x_over = x / m_threshold
            if clamp_structure:
                y_over = min(y_over, 1.0)
                x_over = min(x_over, 1.0)
            less_ab = y_over * max(0.0, 1.0 - x / m_threshold)
            less_ba = x_over * max(0.0, 1.0 - y / m_threshold)
            raw = max(less_ab, less_ba)
            mask = math.tanh(diff[r, c] / p_threshold * math.pi)
            out[r, c] = scale * mask * math.log(1.0 + raw)
    return out
