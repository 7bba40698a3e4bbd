"""Pixel-difference and SSIM baselines scored on the same grayscale inputs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .validation import check_gray_image, check_same_shape

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class BaselineScores:
    l1: float
    l2: float
    ssim: float


def _pair(a, b, min_side=1):
    a = check_gray_image(a, name="a", min_side=min_side)
    b = check_gray_image(b, name="b", min_side=min_side)
    check_same_shape(a, b)
    return a, b


def l1_score(a, b) -> float:
    """Mean absolute difference."""
    a, b = _pair(a, b)
    return float(np.mean(np.abs(a - b)))


def l2_score(a, b) -> float:
    """Root-mean-square difference."""
    a, b = _pair(a, b)
    d = a - b
    return float(np.sqrt(np.mean(d * d)))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    radius = (size - 1) / 2.0
    x = np.arange(size) - radius
    w = np.exp(-0.5 * (x / sigma) ** 2)
    return w / w.sum()


def ssim_map(a, b) -> np.ndarray:
    """Local SSIM over the valid region (borders cropped by the window radius).

    Uses an 11x11 Gaussian window with sigma 1.5 and the stabilizers
    ``(0.01)^2`` and ``(0.03)^2`` for a unit dynamic range.
    """
    a, b = _pair(a, b, min_side=SSIM_WINDOW)
    w = gaussian_window()

    def blur(x):
        return correlate1d(correlate1d(x, w, axis=0, mode="reflect"), w, axis=1, mode="reflect")

    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a * mu_a
    var_b = blur(b * b) - mu_b * mu_b
    cov = blur(a * b) - mu_a * mu_b
    num = (2.0 * (mu_a * mu_b) + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    pad = SSIM_WINDOW // 2
    return (num / den)[pad:-pad, pad:-pad]


def ssim_score(a, b) -> float:
    return float(np.mean(ssim_map(a, b)))


def baseline_scores(a, b) -> BaselineScores:
    return BaselineScores(l1=l1_score(a, b), l2=l2_score(a, b), ssim=ssim_score(a, b))
