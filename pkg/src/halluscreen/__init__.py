"""Screening of normalized histology tiles for hallucinated structure."""

from .baselines import BaselineScores, baseline_scores, l1_score, l2_score, ssim_score
from .normalizer import ChannelStats, ReinhardNormalizer, channel_stats, reinhard_transfer
from .pipeline import PairError, PairRecord, PairScore, discover_pairs, run_batch, score_arrays, score_pair
from .report import DistributionSummary, emit_heatmap, export_scores, rank_outliers, read_scores, summarize_distribution
from .sd_core import SdConfig, StructureDiscrepancy, aggregate, box_smooth, sd_map, sobel_magnitude, to_grayscale

__version__ = "0.1.0"

__all__ = [
    "BaselineScores",
    "ChannelStats",
    "DistributionSummary",
    "PairError",
    "PairRecord",
    "PairScore",
    "ReinhardNormalizer",
    "SdConfig",
    "StructureDiscrepancy",
    "aggregate",
    "baseline_scores",
    "box_smooth",
    "channel_stats",
    "discover_pairs",
    "emit_heatmap",
    "export_scores",
    "l1_score",
    "l2_score",
    "rank_outliers",
    "read_scores",
    "reinhard_transfer",
    "run_batch",
    "score_arrays",
    "score_pair",
    "sd_map",
    "sobel_magnitude",
    "ssim_score",
    "summarize_distribution",
    "to_grayscale",
]
