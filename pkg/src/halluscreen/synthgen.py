"""Synthetic (original, processed) pairs with known ground truth.

Hallucinated pairs fabricate or wipe out texture in a rectangle and carry a
small global shift. Benign pairs differ only by a large uniform intensity
shift, so their edge maps are identical.

Generated images live on a dyadic grid (multiples of ``2**-16``). Adding a
shift from the same grid is then exact in float64, which is what makes the
benign edge maps bitwise equal rather than merely close.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.ndimage import gaussian_filter

from .exceptions import RegionOutOfBounds, ValueOverflow
from .validation import check_gray_image

PATTERNS = ("checkerboard", "stripes", "speckle")
LABELS = ("hallucinated", "benign")
GRID = 2.0 ** -16


@dataclass(frozen=True)
class Region:
    top: int
    left: int
    height: int
    width: int

    def slices(self):
        return slice(self.top, self.top + self.height), slice(self.left, self.left + self.width)

    def check_within(self, shape):
        h, w = shape[:2]
        if (self.top < 0 or self.left < 0 or self.height < 1 or self.width < 1
                or self.top + self.height > h or self.left + self.width > w):
            raise RegionOutOfBounds(f"{self} does not fit in a {h}x{w} image")


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    region: Region
    pattern: str = "checkerboard"
    pattern_contrast: float = 0.5
    shift_delta: float = 0.0
    label: str = "hallucinated"
    period: int = 8

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if not 0.0 <= self.pattern_contrast <= 1.0:
            raise ValueError(f"pattern_contrast must lie in [0, 1], got {self.pattern_contrast}")
        if self.period < 2:
            raise ValueError("period must be at least 2 pixels")


class SynthPair(NamedTuple):
    original: np.ndarray
    processed: np.ndarray
    label: str


def _pattern(spec: SynthSpec, height: int, width: int) -> np.ndarray:
    cell = spec.period // 2
    rows = np.arange(height)[:, None] // cell
    cols = np.arange(width)[None, :] // cell
    if spec.pattern == "checkerboard":
        return ((rows + cols) % 2).astype(np.float64)
    if spec.pattern == "stripes":
        return np.broadcast_to(cols % 2, (height, width)).astype(np.float64)
    rng = np.random.default_rng(spec.seed)
    blocks = rng.integers(0, 2, size=(rows.max() + 1, cols.max() + 1))
    return blocks[rows, cols].astype(np.float64)


def inject_structure(img, spec: SynthSpec) -> np.ndarray:
    """Add a zero-mean binary pattern of amplitude ``pattern_contrast`` to the region.

    Pixels outside the region are returned unchanged.
    """
    x = check_gray_image(img, min_side=1)
    spec.region.check_within(x.shape)
    out = x.copy()
    rs, cs = spec.region.slices()
    if spec.pattern_contrast == 0.0:
        return out
    pattern = _pattern(spec, spec.region.height, spec.region.width)
    patch = out[rs, cs] + spec.pattern_contrast * (pattern - 0.5)
    if patch.min() < 0.0 or patch.max() > 1.0:
        raise ValueOverflow("injected pattern leaves [0, 1]; lower the contrast or the base intensity")
    out[rs, cs] = patch
    return out


def erase_structure(img, region: Region) -> np.ndarray:
    """Flatten the region to its own mean intensity."""
    x = check_gray_image(img, min_side=1)
    region.check_within(x.shape)
    out = x.copy()
    rs, cs = region.slices()
    out[rs, cs] = out[rs, cs].mean()
    return out


def shift_intensity(img, delta: float) -> np.ndarray:
    x = check_gray_image(img, min_side=1)
    out = x + float(delta)
    if out.min() < 0.0 or out.max() > 1.0:
        raise ValueOverflow(f"shift by {delta} moves values outside [0, 1]")
    return out


def quantize(x, step: float = GRID):
    return np.round(np.asarray(x, dtype=np.float64) / step) * step


def tissue_like(rng: np.random.Generator, size: int = 128) -> np.ndarray:
    """Grayscale tile loosely resembling stained tissue: a slowly varying
    background, fine granular texture and scattered dark nuclei.

    Values lie in [0.3, 0.7] on the dyadic grid.
    """
    background = gaussian_filter(rng.standard_normal((size, size)), 12.0, mode="wrap")
    background *= 0.04 / (background.std() + 1e-12)
    grain = gaussian_filter(rng.standard_normal((size, size)), 1.2)
    grain *= rng.uniform(0.02, 0.04) / (grain.std() + 1e-12)

    nuclei = np.zeros((size, size))
    for _ in range(rng.integers(size * size // 500, size * size // 250)):
        cy, cx = rng.uniform(0, size, 2)
        radius = rng.uniform(2.5, 5.0)
        depth = rng.uniform(0.08, 0.14)
        # only the disk's bounding box can be touched
        r0, r1 = max(0, int(cy - radius)), min(size, int(cy + radius) + 2)
        c0, c1 = max(0, int(cx - radius)), min(size, int(cx + radius) + 2)
        yy, xx = np.mgrid[r0:r1, c0:c1]
        disk = ((yy - cy) ** 2 + (xx - cx) ** 2 <= radius ** 2) * depth
        np.maximum(nuclei[r0:r1, c0:c1], disk, out=nuclei[r0:r1, c0:c1])
    nuclei = gaussian_filter(nuclei, 0.7)

    img = 0.55 + background + grain - nuclei
    return quantize(np.clip(img, 0.3, 0.7))


def random_region(rng: np.random.Generator, size: int, lo: int, hi: int) -> Region:
    h, w = rng.integers(lo, hi + 1, size=2)
    top = int(rng.integers(0, size - h + 1))
    left = int(rng.integers(0, size - w + 1))
    return Region(top, left, int(h), int(w))


def hallucinated_pair(rng: np.random.Generator, size: int = 128) -> SynthPair:
    original = tissue_like(rng, size)
    region = random_region(rng, size, size // 4, (size * 7) // 16)
    if rng.random() < 0.5:
        spec = SynthSpec(
            seed=int(rng.integers(2 ** 31)),
            region=region,
            pattern=PATTERNS[int(rng.integers(len(PATTERNS)))],
            pattern_contrast=float(rng.uniform(0.3, 0.4)),
            period=int(rng.choice([6, 8, 10])),
        )
        altered = inject_structure(original, spec)
    else:
        altered = erase_structure(original, region)
    delta = quantize(rng.uniform(-0.05, 0.05))
    return SynthPair(original, shift_intensity(altered, delta), "hallucinated")


def benign_pair(rng: np.random.Generator, size: int = 128) -> SynthPair:
    original = tissue_like(rng, size)
    delta = quantize(rng.uniform(0.1, 0.25) * rng.choice([-1.0, 1.0]))
    return SynthPair(original, shift_intensity(original, delta), "benign")


def make_corpus(n_hallucinated: int, n_benign: int, seed: int, size: int = 128) -> list[SynthPair]:
    """Seeded corpus with classes interleaved in a seeded random order."""
    if n_hallucinated < 0 or n_benign < 0:
        raise ValueError("counts must be nonnegative")
    labels = np.array(["hallucinated"] * n_hallucinated + ["benign"] * n_benign)
    order = np.random.default_rng([seed, 0]).permutation(len(labels))
    corpus = []
    for i, label in enumerate(labels[order]):
        rng = np.random.default_rng([seed, 1, i])
        make = hallucinated_pair if label == "hallucinated" else benign_pair
        corpus.append(make(rng, size))
    return corpus


def pair_ids(n: int) -> list[str]:
    return [f"tile_{i:05d}" for i in range(n)]


def write_corpus(corpus, out_dir) -> Path:
    """Write ``original/``, ``processed/`` 16-bit PNGs and ``labels.json``.

    Returns the path of the labels manifest.
    """
    from .imageio import write_image

    out_dir = Path(out_dir)
    (out_dir / "original").mkdir(parents=True, exist_ok=True)
    (out_dir / "processed").mkdir(parents=True, exist_ok=True)
    manifest = []
    for pid, pair in zip(pair_ids(len(corpus)), corpus):
        write_image(out_dir / "original" / f"{pid}.png", pair.original, bit_depth=16)
        write_image(out_dir / "processed" / f"{pid}.png", pair.processed, bit_depth=16)
        manifest.append({"pair_id": pid, "label": pair.label})
    labels_path = out_dir / "labels.json"
    labels_path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return labels_path


def read_labels(path) -> dict[str, str]:
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    return {e["pair_id"]: e["label"] for e in entries}
