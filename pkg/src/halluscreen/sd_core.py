"""Structure Discrepancy between an original image and its processed version.

The measure is large where one image carries texture that the other lacks,
and it is gated by a smoothed intensity-difference mask so that identical or
near-identical images score zero. All rasters are float64 arrays with values
in [0, 1]; edge maps and discrepancy maps are nonnegative.

Pipeline for a pair ``(a, b)``::

    sa, sb   = box_smooth(sobel_magnitude(a)), box_smooth(sobel_magnitude(b))
    raw      = max(less_struct(sa, sb), less_struct(sb, sa))
    mask     = tanh(box_smooth(|a - b|) / p * pi)
    sd       = scale * mask * ln(1 + raw)
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import EmptyMap
from .validation import check_gray_image, check_positive, check_rgb_image, check_same_shape

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
AGGREGATIONS = ("max", "mean", "p99")
LOG_BASES = ("natural",)

DEFAULT_M = 0.2
DEFAULT_P = 0.1
DEFAULT_KERNEL = 32
DEFAULT_SCALE = 100.0


@dataclass(frozen=True)
class SdConfig:
    """Parameters of the Structure Discrepancy measure.

    ``m_threshold`` is the Sobel magnitude at which a pixel counts as fully
    textured, ``p_threshold`` the smoothed intensity difference at which the
    mask approaches 1. Both are on the [0, 1] pixel scale.
    """

    m_threshold: float = DEFAULT_M
    p_threshold: float = DEFAULT_P
    kernel_size: int = DEFAULT_KERNEL
    clamp_structure: bool = False
    scale: float = DEFAULT_SCALE
    log_base: str = "natural"
    aggregation: str = "max"

    def __post_init__(self):
        check_positive(self.m_threshold, "m_threshold")
        check_positive(self.p_threshold, "p_threshold")
        check_positive(self.scale, "scale")
        if int(self.kernel_size) != self.kernel_size or self.kernel_size < 1:
            raise ValueError(f"kernel_size must be an integer >= 1, got {self.kernel_size!r}")
        if self.log_base not in LOG_BASES:
            raise ValueError(f"log_base must be one of {LOG_BASES}, got {self.log_base!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}")
        object.__setattr__(self, "m_threshold", float(self.m_threshold))
        object.__setattr__(self, "p_threshold", float(self.p_threshold))
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "kernel_size", int(self.kernel_size))
        object.__setattr__(self, "clamp_structure", bool(self.clamp_structure))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SdConfig":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown SdConfig field(s): {sorted(unknown)}")
        return cls(**known)

    @property
    def digest(self) -> str:
        """Short stable hash identifying these parameters in score exports."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def to_grayscale(img) -> np.ndarray:
    """Rec. 601 luma of an (H, W, 3) RGB image in [0, 1]."""
    rgb = check_rgb_image(img)
    r, g, b = LUMA_WEIGHTS
    gray = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
    # weights sum to 1 only up to rounding
    return np.clip(gray, 0.0, 1.0)


def sobel_magnitude(img) -> np.ndarray:
    """Euclidean norm of the unnormalized 3x3 Sobel responses.

    Borders use replicate padding, so the output has the input's shape.
    """
    x = check_gray_image(img)
    p = np.pad(x, 1, mode="edge")
    gx = (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    gy = (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    return np.sqrt(gx * gx + gy * gy)


def box_window(kernel_size: int) -> tuple[int, int]:
    """Offsets ``(before, after)`` covered by a K-wide window around a pixel.

    Even kernels cover ``[-K/2, K/2 - 1]``; odd kernels are centered.
    """
    before = kernel_size // 2
    return before, kernel_size - 1 - before


def box_smooth(raster, kernel_size: int = DEFAULT_KERNEL) -> np.ndarray:
    """Same-size K x K mean filter with replicate padding.

    Implemented as two separable running-sum passes. Each pass differences a
    cumulative sum, so a window of exact zeros yields exactly zero and a
    nonnegative input never produces a negative output.
    """
    k = int(kernel_size)
    if k < 1 or k != kernel_size:
        raise ValueError(f"kernel_size must be an integer >= 1, got {kernel_size!r}")
    arr = np.asarray(raster, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"raster must be 2-D, got shape {arr.shape}")
    if k == 1:
        return arr.copy()
    before, after = box_window(k)
    padded = np.pad(arr, ((before, after), (before, after)), mode="edge")

    csum = np.zeros((padded.shape[0], padded.shape[1] + 1))
    np.cumsum(padded, axis=1, out=csum[:, 1:])
    rows = csum[:, k:] - csum[:, :-k]

    csum = np.zeros((rows.shape[0] + 1, rows.shape[1]))
    np.cumsum(rows, axis=0, out=csum[1:])
    return (csum[k:] - csum[:-k]) / float(k * k)


def less_struct(sx, sy, m: float, clamp: bool = False) -> np.ndarray:
    """Texture present in ``sy`` but missing from ``sx``.

    Per pixel ``(sy / m) * max(0, 1 - sx / m)``. With ``clamp`` the first
    factor saturates at 1.
    """
    sx = np.asarray(sx, dtype=np.float64)
    sy = np.asarray(sy, dtype=np.float64)
    check_same_shape(sx, sy, ("sx", "sy"))
    m = check_positive(m, "m")
    present = sy / m
    if clamp:
        present = np.minimum(present, 1.0)
    return present * np.maximum(0.0, 1.0 - sx / m)


def structure_discrepancy_raw(ls_ab, ls_ba) -> np.ndarray:
    ls_ab = np.asarray(ls_ab, dtype=np.float64)
    ls_ba = np.asarray(ls_ba, dtype=np.float64)
    check_same_shape(ls_ab, ls_ba, ("ls_ab", "ls_ba"))
    return np.maximum(ls_ab, ls_ba)


def diff_mask(a, b, p: float, kernel_size: int = DEFAULT_KERNEL) -> np.ndarray:
    """``tanh(box_smooth(|a - b|) / p * pi)``; only float rounding reaches 1.0."""
    a = check_gray_image(a, name="a", min_side=1)
    b = check_gray_image(b, name="b", min_side=1)
    check_same_shape(a, b)
    p = check_positive(p, "p")
    return np.tanh(box_smooth(np.abs(a - b), kernel_size) / p * math.pi)


def sd_map(a, b, cfg: SdConfig | None = None) -> np.ndarray:
    """Per-pixel Structure Discrepancy of two grayscale images."""
    cfg = cfg or SdConfig()
    a = check_gray_image(a, name="a")
    b = check_gray_image(b, name="b")
    check_same_shape(a, b)
    k = cfg.kernel_size
    sa = box_smooth(sobel_magnitude(a), k)
    sb = box_smooth(sobel_magnitude(b), k)
    raw = structure_discrepancy_raw(
        less_struct(sa, sb, cfg.m_threshold, cfg.clamp_structure),
        less_struct(sb, sa, cfg.m_threshold, cfg.clamp_structure),
    )
    mask = diff_mask(a, b, cfg.p_threshold, k)
    return cfg.scale * mask * np.log1p(raw)


def aggregate(sdmap, mode: str = "max") -> float:
    """Collapse a discrepancy map to one score: ``max``, ``mean`` or ``p99``."""
    values = np.asarray(sdmap, dtype=np.float64)
    if values.size == 0:
        raise EmptyMap("cannot aggregate an empty map")
    if mode == "max":
        return float(values.max())
    if mode == "mean":
        return float(values.mean())
    if mode == "p99":
        return float(np.percentile(values, 99, method="linear"))
    raise ValueError(f"mode must be one of {AGGREGATIONS}, got {mode!r}")


def _as_pairs(X):
    if isinstance(X, np.ndarray):
        if X.ndim != 4 or X.shape[1] != 2:
            raise ValueError(f"expected an array of shape (n_pairs, 2, H, W), got {X.shape}")
    pairs = list(X)
    for i, pair in enumerate(pairs):
        if len(pair) != 2:
            raise ValueError(f"entry {i} is not an (original, processed) pair")
    return pairs


class StructureDiscrepancy(TransformerMixin, BaseEstimator):
    """Scores (original, processed) image pairs by Structure Discrepancy.

    The estimator is stateless; ``fit`` only validates the parameters.
    ``transform`` maps each pair to its ``(sd_max, sd_mean, sd_p99)`` row and
    ``score_pairs`` returns the configured aggregation.

    Example:
        >>> import numpy as np
        >>> a = np.full((40, 40), 0.5)
        >>> StructureDiscrepancy(kernel_size=8).score_pairs([(a, a)])
        array([0.])
    """

    def __init__(
        self,
        m_threshold=DEFAULT_M,
        p_threshold=DEFAULT_P,
        kernel_size=DEFAULT_KERNEL,
        clamp_structure=False,
        scale=DEFAULT_SCALE,
        aggregation="max",
    ):
        self.m_threshold = m_threshold
        self.p_threshold = p_threshold
        self.kernel_size = kernel_size
        self.clamp_structure = clamp_structure
        self.scale = scale
        self.aggregation = aggregation

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags

    @property
    def config(self) -> SdConfig:
        return SdConfig(
            m_threshold=self.m_threshold,
            p_threshold=self.p_threshold,
            kernel_size=self.kernel_size,
            clamp_structure=self.clamp_structure,
            scale=self.scale,
            aggregation=self.aggregation,
        )

    def fit(self, X=None, y=None):
        self.config_ = self.config
        return self

    def score_map(self, a, b) -> np.ndarray:
        return sd_map(a, b, self.config)

    def transform(self, X) -> np.ndarray:
        cfg = self.config
        rows = []
        for a, b in _as_pairs(X):
            m = sd_map(a, b, cfg)
            rows.append([aggregate(m, mode) for mode in AGGREGATIONS])
        return np.asarray(rows, dtype=np.float64).reshape(-1, len(AGGREGATIONS))

    def score_pairs(self, X) -> np.ndarray:
        cfg = self.config
        return np.array([aggregate(sd_map(a, b, cfg), cfg.aggregation) for a, b in _as_pairs(X)])

    def get_feature_names_out(self, input_features=None):
        return np.array([f"sd_{mode}" for mode in AGGREGATIONS], dtype=object)


__all__ = [
    "SdConfig",
    "StructureDiscrepancy",
    "aggregate",
    "box_smooth",
    "box_window",
    "diff_mask",
    "less_struct",
    "sd_map",
    "sobel_magnitude",
    "structure_discrepancy_raw",
    "to_grayscale",
]
