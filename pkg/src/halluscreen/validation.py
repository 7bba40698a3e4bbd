"""Input validation helpers shared by the estimators and functional API."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch, ImageTooSmall, ValueOverflow

MIN_SIDE = 3


def check_gray_image(img, *, name: str = "image", min_side: int = MIN_SIDE) -> np.ndarray:
    """Return ``img`` as a 2-D float64 array with values in [0, 1].

    Raises:
        ValueError: if the array is not 2-D or contains non-finite values.
        ImageTooSmall: if either side is shorter than ``min_side``.
        ValueOverflow: if any value lies outside [0, 1].
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    _check_size(arr, name, min_side)
    _check_range(arr, name)
    return arr


def check_rgb_image(img, *, name: str = "image", min_side: int = 1) -> np.ndarray:
    """Return ``img`` as an (H, W, 3) float64 array with values in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    _check_size(arr, name, min_side)
    _check_range(arr, name)
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names=("a", "b")) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(
            f"{names[0]} has shape {a.shape} but {names[1]} has shape {b.shape}"
        )


def check_positive(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _check_size(arr, name, min_side):
    h, w = arr.shape[:2]
    if h < min_side or w < min_side:
        raise ImageTooSmall(f"{name} is {h}x{w}; at least {min_side}x{min_side} is required")


def _check_range(arr, name):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueOverflow(
            f"{name} has values in [{arr.min():.6g}, {arr.max():.6g}], expected [0, 1]"
        )
