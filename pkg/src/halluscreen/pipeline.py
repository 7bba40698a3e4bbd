"""Pair discovery and batch scoring of (original, processed) tile directories."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .baselines import baseline_scores
from .exceptions import DirectoryUnreadable, UnmatchedFiles
from .imageio import IMAGE_SUFFIXES, read_gray
from .sd_core import SdConfig, aggregate, sd_map
from .validation import check_same_shape

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairRecord:
    pair_id: str
    path_original: Path
    path_processed: Path


@dataclass(frozen=True)
class PairScore:
    pair_id: str
    sd_max: float
    sd_mean: float
    sd_p99: float
    l1: float
    l2: float
    ssim: float
    width: int
    height: int
    config_digest: str

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PairError:
    """Stands in for a PairScore when a pair could not be scored."""

    pair_id: str
    error: str
    message: str


SCORE_COLUMNS = tuple(f.name for f in fields(PairScore))


def _list_images(directory: Path) -> dict[str, Path]:
    if not directory.is_dir():
        raise DirectoryUnreadable(f"{directory} is not a readable directory")
    try:
        entries = sorted(directory.iterdir())
    except OSError as exc:
        raise DirectoryUnreadable(f"cannot list {directory}: {exc}") from exc
    by_stem: dict[str, Path] = {}
    for path in entries:
        if not path.is_file() or path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        if path.stem in by_stem:
            raise ValueError(f"ambiguous stem {path.stem!r} in {directory}: {by_stem[path.stem].name}, {path.name}")
        by_stem[path.stem] = path
    return by_stem


def discover_pairs(dir_original, dir_processed) -> list[PairRecord]:
    """Match tiles by filename stem; any tile without a partner is an error."""
    originals = _list_images(Path(dir_original))
    processed = _list_images(Path(dir_processed))
    orphans = [originals[s] for s in sorted(originals.keys() - processed.keys())]
    orphans += [processed[s] for s in sorted(processed.keys() - originals.keys())]
    if orphans:
        raise UnmatchedFiles(orphans)
    return [PairRecord(stem, originals[stem], processed[stem]) for stem in sorted(originals)]


def score_arrays(a, b, cfg: SdConfig | None = None, pair_id: str = "") -> PairScore:
    cfg = cfg or SdConfig()
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    check_same_shape(a, b, ("original", "processed"))
    sdm = sd_map(a, b, cfg)
    base = baseline_scores(a, b)
    return PairScore(
        pair_id=pair_id,
        sd_max=aggregate(sdm, "max"),
        sd_mean=aggregate(sdm, "mean"),
        sd_p99=aggregate(sdm, "p99"),
        l1=base.l1,
        l2=base.l2,
        ssim=base.ssim,
        width=int(a.shape[1]),
        height=int(a.shape[0]),
        config_digest=cfg.digest,
    )


def score_pair(rec: PairRecord, cfg: SdConfig | None = None) -> PairScore:
    return score_arrays(read_gray(rec.path_original), read_gray(rec.path_processed), cfg, rec.pair_id)


def _score_or_error(job):
    rec, cfg = job
    try:
        return score_pair(rec, cfg)
    except Exception as exc:  # one bad tile must not abort the batch
        return PairError(rec.pair_id, type(exc).__name__, str(exc))


def run_batch(pairs, cfg: SdConfig | None = None, parallelism: int = 1) -> list:
    """Score every pair; entry ``i`` of the result belongs to ``pairs[i]``.

    Entries are :class:`PairScore` or, for pairs that failed, :class:`PairError`.
    Results do not depend on ``parallelism``.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    cfg = cfg or SdConfig()
    pairs = list(pairs)
    results: list = [None] * len(pairs)
    jobs = [(rec, cfg) for rec in pairs]
    if parallelism == 1 or len(pairs) <= 1:
        for i, job in enumerate(jobs):
            results[i] = _score_or_error(job)
    else:
        workers = min(parallelism, len(pairs))
        chunksize = max(1, len(jobs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(_score_or_error, jobs, chunksize=chunksize)):
                results[i] = res
    n_err = sum(isinstance(r, PairError) for r in results)
    if n_err:
        logger.warning("%d of %d pairs failed to score", n_err, len(pairs))
    return results


def split_results(results) -> tuple[list[PairScore], list[PairError]]:
    scores = [r for r in results if isinstance(r, PairScore)]
    errors = [r for r in results if isinstance(r, PairError)]
    return scores, errors


def default_jobs() -> int:
    return os.cpu_count() or 1
