"""Decoding and encoding of 8/16-bit PNG and TIFF tiles."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .exceptions import DecodeError

IMAGE_SUFFIXES = (".png", ".tif", ".tiff")
_SCALE = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}


def read_image(path) -> np.ndarray:
    """Decode a tile to float64 in [0, 1].

    Grayscale files give an (H, W) array, color files an (H, W, 3) RGB array.
    An alpha channel is dropped.
    """
    path = Path(path)
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DecodeError(f"cannot decode image {path}")
    if raw.dtype not in _SCALE:
        raise DecodeError(f"{path}: unsupported sample type {raw.dtype}, expected 8 or 16 bit")
    img = raw.astype(np.float64) / _SCALE[raw.dtype]
    if img.ndim == 3:
        if img.shape[2] == 1:
            return img[..., 0]
        if img.shape[2] == 4:
            img = img[..., :3]
        if img.shape[2] != 3:
            raise DecodeError(f"{path}: unsupported channel count {img.shape[2]}")
        img = img[..., ::-1].copy()
    return img


def read_gray(path) -> np.ndarray:
    from .sd_core import to_grayscale

    img = read_image(path)
    return to_grayscale(img) if img.ndim == 3 else img


def write_image(path, img, bit_depth: int = 8) -> None:
    """Encode an [0, 1] gray or RGB array; values are rounded to the bit depth."""
    if bit_depth not in (8, 16):
        raise ValueError("bit_depth must be 8 or 16")
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    data = np.round(arr * _SCALE[np.dtype(dtype)]).astype(dtype)
    if data.ndim == 3:
        data = data[..., ::-1]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), data):
        raise OSError(f"failed to write {path}")


def bit_depth_of(path) -> int:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DecodeError(f"cannot decode image {path}")
    return 16 if raw.dtype == np.uint16 else 8
