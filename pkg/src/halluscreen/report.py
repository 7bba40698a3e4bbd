"""Population summaries, outlier ranking, heatmaps and score exports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DimensionMismatch, EmptyInput
from .pipeline import SCORE_COLUMNS, PairScore
from .validation import check_positive, check_rgb_image

SCORE_FIELDS = ("sd_max", "sd_mean", "sd_p99", "l1", "l2", "ssim")
DEFAULT_FIELD = "sd_max"
DEFAULT_HEATMAP_CAP = 100.0 * math.log(2.0)
WHISKER_IQR = 1.5
_INT_COLUMNS = ("width", "height")
_STR_COLUMNS = ("pair_id", "config_digest")


@dataclass(frozen=True)
class DistributionSummary:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outlier_ids: list = field(default_factory=list)
    field_name: str = DEFAULT_FIELD
    quantile_method: str = "linear (type 7)"

    def to_json(self) -> dict:
        return asdict(self)


def _field_values(scores, field_name):
    if field_name not in SCORE_FIELDS:
        raise ValueError(f"field must be one of {SCORE_FIELDS}, got {field_name!r}")
    return [s.pair_id for s in scores], np.array([getattr(s, field_name) for s in scores], dtype=np.float64)


def summarize_values(values, ids=None, field_name: str = DEFAULT_FIELD) -> DistributionSummary:
    """Boxplot statistics with Tukey whiskers at 1.5 IQR.

    Whiskers sit on the most extreme data points inside the fences and never
    cross the quartiles; points beyond the fences are outliers.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("cannot summarize an empty score set")
    ids = list(range(x.size)) if ids is None else list(ids)
    q1, median, q3 = np.percentile(x, [25, 50, 75], method="linear")
    iqr = q3 - q1
    lo_fence = q1 - WHISKER_IQR * iqr
    hi_fence = q3 + WHISKER_IQR * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    whisker_low = min(inside.min(), q1) if inside.size else q1
    whisker_high = max(inside.max(), q3) if inside.size else q3
    outliers = [ids[i] for i in np.flatnonzero((x < lo_fence) | (x > hi_fence))]
    return DistributionSummary(
        n=int(x.size),
        min=float(x.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        max=float(x.max()),
        whisker_low=float(whisker_low),
        whisker_high=float(whisker_high),
        outlier_ids=outliers,
        field_name=field_name,
    )


def summarize_distribution(scores, field: str = DEFAULT_FIELD) -> DistributionSummary:
    ids, values = _field_values(list(scores), field)
    return summarize_values(values, ids, field)


def rank_outliers(scores, field: str = DEFAULT_FIELD, top_k: int = 10) -> list[tuple[str, float]]:
    """Highest-scoring pairs first; ties go to the smaller pair_id."""
    if top_k < 0:
        raise ValueError("top_k must be >= 0")
    ids, values = _field_values(list(scores), field)
    ranked = sorted(zip(ids, values.tolist()), key=lambda iv: (-iv[1], iv[0]))
    return ranked[:top_k]


def hot_colors(t):
    """Black-red-yellow-white ramp for ``t`` in [0, 1]."""
    t = np.asarray(t, dtype=np.float64)[..., None]
    return np.clip(3.0 * t - np.array([0.0, 1.0, 2.0]), 0.0, 1.0)


def emit_heatmap(sdmap, base, cap: float | None = None) -> np.ndarray:
    """Overlay a discrepancy map on an RGB base image.

    Each pixel's strength ``t = min(value / cap, 1)`` selects a color on the
    hot ramp and is also its blending weight, so zero leaves the base pixel
    untouched and ``value >= cap`` shows the pure top color. ``cap`` defaults
    to ``100 * ln 2``; pass ``"data"`` to use the map maximum instead.
    """
    sdmap = np.asarray(sdmap, dtype=np.float64)
    base = np.asarray(base, dtype=np.float64)
    if base.ndim == 2:
        base = np.repeat(base[..., None], 3, axis=2)
    base = check_rgb_image(base, name="base")
    if sdmap.shape != base.shape[:2]:
        raise DimensionMismatch(f"map has shape {sdmap.shape} but base is {base.shape[:2]}")
    if cap is None:
        cap = DEFAULT_HEATMAP_CAP
    elif cap == "data":
        cap = float(sdmap.max()) if sdmap.size and sdmap.max() > 0 else DEFAULT_HEATMAP_CAP
    cap = check_positive(cap, "cap")
    t = np.clip(sdmap / cap, 0.0, 1.0)
    alpha = t[..., None]
    return (1.0 - alpha) * base + alpha * hot_colors(t)


def _fmt(value) -> str:
    return f"{value:.9g}"


def _row(score: PairScore) -> dict:
    row = {}
    for name in SCORE_COLUMNS:
        value = getattr(score, name)
        row[name] = value if name in _STR_COLUMNS or name in _INT_COLUMNS else _fmt(value)
    return row


def format_scores(scores, fmt: str = "csv") -> str:
    scores = list(scores)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=SCORE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for s in scores:
            writer.writerow(_row(s))
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for s in scores:
            row = {k: (float(v) if k not in _STR_COLUMNS and k not in _INT_COLUMNS else v)
                   for k, v in _row(s).items()}
            lines.append(json.dumps(row, separators=(",", ":")))
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"format must be 'csv' or 'jsonl', got {fmt!r}")


def export_scores(scores, fmt: str, destination) -> None:
    """Write scores as CSV or JSON lines; floats carry 9 significant digits."""
    Path(destination).write_text(format_scores(scores, fmt), encoding="utf-8")


def _parse(row: dict) -> PairScore:
    kwargs = {}
    for name in SCORE_COLUMNS:
        value = row[name]
        if name in _INT_COLUMNS:
            kwargs[name] = int(value)
        elif name in _STR_COLUMNS:
            kwargs[name] = str(value)
        else:
            kwargs[name] = float(value)
    return PairScore(**kwargs)


def read_scores(path, fmt: str | None = None) -> list[PairScore]:
    path = Path(path)
    fmt = fmt or ("jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv")
    text = path.read_text(encoding="utf-8")
    if fmt == "jsonl":
        return [_parse(json.loads(line)) for line in text.splitlines() if line.strip()]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != SCORE_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
    return [_parse(row) for row in reader]


def separation_auroc(scores, labels: dict, positive: str = "hallucinated") -> dict[str, float]:
    """AUROC of each score field for separating ``positive`` pairs from the rest.

    SSIM is a similarity, so it enters as ``1 - ssim``.
    """
    from sklearn.metrics import roc_auc_score

    scores = [s for s in scores if s.pair_id in labels]
    y = [labels[s.pair_id] == positive for s in scores]
    if len(set(y)) < 2:
        raise ValueError("both classes must be present to compute AUROC")
    out = {}
    for name in SCORE_FIELDS:
        values = np.array([getattr(s, name) for s in scores])
        if name == "ssim":
            out["1-ssim"] = float(roc_auc_score(y, 1.0 - values))
        else:
            out[name] = float(roc_auc_score(y, values))
    return out
