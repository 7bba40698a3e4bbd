"""Reinhard color transfer in the decorrelated l-alpha-beta space.

Used to produce realistic, structure-preserving normalized tiles so that the
screening pipeline can be exercised end to end without a generative model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import EmptyImage
from .validation import check_rgb_image

STATS_FORMAT_VERSION = 1
LOG_EPSILON = 1e-6
# std at or below this is treated as a flat channel (mean shift only)
DEGENERATE_STD = 1e-12

RGB_TO_LMS = np.array([
    [0.3811, 0.5783, 0.0402],
    [0.1967, 0.7244, 0.0782],
    [0.0241, 0.1288, 0.8444],
])
LOGLMS_TO_LAB = np.diag([1 / np.sqrt(3), 1 / np.sqrt(6), 1 / np.sqrt(2)]) @ np.array([
    [1.0, 1.0, 1.0],
    [1.0, 1.0, -2.0],
    [1.0, -1.0, 0.0],
])
LMS_TO_RGB = np.linalg.inv(RGB_TO_LMS)
LAB_TO_LOGLMS = np.linalg.inv(LOGLMS_TO_LAB)


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel means and population standard deviations in l-alpha-beta."""

    means: tuple[float, float, float]
    stds: tuple[float, float, float]

    def __post_init__(self):
        if len(self.means) != 3 or len(self.stds) != 3:
            raise ValueError("ChannelStats needs exactly three means and three stds")
        if any(s < 0 for s in self.stds):
            raise ValueError("standard deviations must be nonnegative")
        object.__setattr__(self, "means", tuple(float(v) for v in self.means))
        object.__setattr__(self, "stds", tuple(float(v) for v in self.stds))

    def to_json(self) -> dict:
        return {
            "format_version": STATS_FORMAT_VERSION,
            "color_space": "lalphabeta",
            "log_epsilon": LOG_EPSILON,
            "means": list(self.means),
            "stds": list(self.stds),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChannelStats":
        version = data.get("format_version")
        if version != STATS_FORMAT_VERSION:
            raise ValueError(f"unsupported stats format_version {version!r}")
        return cls(means=tuple(data["means"]), stds=tuple(data["stds"]))


def save_stats(stats: ChannelStats, path) -> None:
    Path(path).write_text(json.dumps(stats.to_json(), indent=2) + "\n", encoding="utf-8")


def load_stats(path) -> ChannelStats:
    return ChannelStats.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def rgb_to_lalphabeta(img) -> np.ndarray:
    rgb = check_rgb_image(img)
    lms = rgb @ RGB_TO_LMS.T
    return np.log10(lms + LOG_EPSILON) @ LOGLMS_TO_LAB.T


def lalphabeta_to_rgb(lab, clip: bool = True) -> np.ndarray:
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 3 or lab.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) raster, got shape {lab.shape}")
    lms = 10.0 ** (lab @ LAB_TO_LOGLMS.T) - LOG_EPSILON
    rgb = lms @ LMS_TO_RGB.T
    return np.clip(rgb, 0.0, 1.0) if clip else rgb


def _lab_stats(lab: np.ndarray) -> ChannelStats:
    flat = lab.reshape(-1, 3)
    return ChannelStats(means=tuple(flat.mean(axis=0)), stds=tuple(flat.std(axis=0)))


def channel_stats(img) -> ChannelStats:
    arr = np.asarray(img)
    if arr.size == 0:
        raise EmptyImage("cannot compute statistics of an empty image")
    return _lab_stats(rgb_to_lalphabeta(arr))


def transfer_lalphabeta(lab, source: ChannelStats, target: ChannelStats) -> np.ndarray:
    """Match channel means and stds of ``lab`` to ``target``, before clipping."""
    src_mean = np.asarray(source.means)
    src_std = np.asarray(source.stds)
    tgt_std = np.asarray(target.stds)
    flat = src_std <= DEGENERATE_STD
    ratio = np.where(flat, 1.0, tgt_std / np.where(flat, 1.0, src_std))
    return (np.asarray(lab) - src_mean) * ratio + np.asarray(target.means)


def reinhard_transfer(src, target: ChannelStats) -> np.ndarray:
    """Recolor ``src`` so its l-alpha-beta statistics match ``target``."""
    lab = rgb_to_lalphabeta(src)
    return lalphabeta_to_rgb(transfer_lalphabeta(lab, _lab_stats(lab), target))


class ReinhardNormalizer(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`reinhard_transfer`.

    ``fit`` takes one target RGB image or a sequence of them (statistics are
    pooled over all pixels); ``transform`` recolors one image or a sequence.
    """

    def __init__(self, target_stats=None):
        self.target_stats = target_stats

    def fit(self, X, y=None):
        images = [X] if _is_single(X) else list(X)
        if not images:
            raise EmptyImage("fit needs at least one target image")
        labs = [rgb_to_lalphabeta(img).reshape(-1, 3) for img in images]
        self.target_stats_ = _lab_stats(np.concatenate(labs)[:, None, :])
        return self

    def _stats(self) -> ChannelStats:
        if hasattr(self, "target_stats_"):
            return self.target_stats_
        if self.target_stats is not None:
            return self.target_stats
        raise NotFittedError(
            "This ReinhardNormalizer has no target statistics; call 'fit' or pass target_stats."
        )

    def transform(self, X):
        stats = self._stats()
        if _is_single(X):
            return reinhard_transfer(X, stats)
        return [reinhard_transfer(img, stats) for img in X]


def _is_single(X) -> bool:
    return isinstance(X, np.ndarray) and X.ndim == 3
