import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halluscreen.exceptions import DimensionMismatch, EmptyInput
from halluscreen.pipeline import SCORE_COLUMNS, PairScore
from halluscreen.report import (
    DEFAULT_HEATMAP_CAP,
    emit_heatmap,
    export_scores,
    format_scores,
    hot_colors,
    rank_outliers,
    read_scores,
    separation_auroc,
    summarize_distribution,
    summarize_values,
)

HEADER = "pair_id,sd_max,sd_mean,sd_p99,l1,l2,ssim,width,height,config_digest"


def make_score(pid, sd_max=1.0, **kw):
    base = dict(pair_id=pid, sd_max=sd_max, sd_mean=sd_max / 3, sd_p99=sd_max / 2,
                l1=0.1, l2=0.2, ssim=0.9, width=64, height=48, config_digest="abc123")
    base.update(kw)
    return PairScore(**base)


def brute_quantile(values, q):
    s = sorted(values)
    h = (len(s) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def test_quartiles_of_one_to_five():
    s = summarize_values([1, 2, 3, 4, 5])
    assert (s.q1, s.median, s.q3) == (2.0, 3.0, 4.0)
    assert s.outlier_ids == []


def test_single_value():
    s = summarize_values([7.5], ids=["only"])
    assert s.min == s.q1 == s.median == s.q3 == s.max == s.whisker_low == s.whisker_high == 7.5
    assert s.outlier_ids == []


def test_tukey_outlier():
    s = summarize_values([1, 2, 3, 4, 100], ids="abcde")
    # IQR 2 puts the upper fence at 7; the highest point inside is 4
    assert (s.q1, s.q3) == (2.0, 4.0)
    assert s.whisker_high == 4.0 and s.whisker_low == 1.0
    assert s.outlier_ids == ["e"]


def test_summary_errors_and_field():
    with pytest.raises(EmptyInput):
        summarize_values([])
    scores = [make_score("a", 1.0), make_score("b", 2.0)]
    assert summarize_distribution(scores, "sd_max").max == 2.0
    assert summarize_distribution(scores, "l2").field_name == "l2"
    with pytest.raises(ValueError):
        summarize_distribution(scores, "nope")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=300))
def test_summary_matches_sorted_oracle(values):
    s = summarize_values(values)
    for got, q in ((s.q1, 0.25), (s.median, 0.5), (s.q3, 0.75)):
        assert got == pytest.approx(brute_quantile(values, q), rel=1e-12, abs=1e-9)
    assert s.min <= s.whisker_low <= s.q1 <= s.median <= s.q3 <= s.whisker_high <= s.max
    for i in s.outlier_ids:
        assert not s.whisker_low <= values[i] <= s.whisker_high


def test_rank_outliers():
    scores = [make_score("a", 5), make_score("b", 9), make_score("c", 9)]
    assert rank_outliers(scores, top_k=0) == []
    assert [pid for pid, _ in rank_outliers(scores, top_k=3)] == ["b", "c", "a"]
    assert len(rank_outliers(scores, top_k=10)) == 3
    with pytest.raises(ValueError):
        rank_outliers(scores, top_k=-1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 100), max_size=30), st.integers(0, 40))
def test_rank_is_permutation_prefix(values, k):
    scores = [make_score(f"p{i:02d}", v) for i, v in enumerate(values)]
    ranked = rank_outliers(scores, top_k=k)
    ids = [pid for pid, _ in ranked]
    assert len(ids) == len(set(ids)) == min(k, len(values))
    assert set(ids) <= {s.pair_id for s in scores}
    assert all(x[1] >= y[1] for x, y in zip(ranked, ranked[1:]))


def test_heatmap_contracts(rng):
    base = rng.random((10, 12, 3))
    assert np.array_equal(emit_heatmap(np.zeros((10, 12)), base), base)
    sdmap = np.zeros((10, 12))
    sdmap[2, 3] = 5.0
    sdmap[4, 5] = 10.0
    out = emit_heatmap(sdmap, base, cap=5.0)
    assert np.array_equal(out[2, 3], hot_colors(1.0))
    assert np.array_equal(out[2, 3], out[4, 5])
    untouched = sdmap == 0
    assert np.array_equal(out[untouched], base[untouched])
    with pytest.raises(DimensionMismatch):
        emit_heatmap(np.zeros((3, 3)), base)


def test_heatmap_caps():
    base = np.full((4, 4, 3), 0.5)
    sdmap = np.full((4, 4), 10.0)
    assert np.array_equal(emit_heatmap(sdmap, base, cap="data"), np.broadcast_to(hot_colors(1.0), base.shape))
    partial = emit_heatmap(sdmap, base)
    t = 10.0 / DEFAULT_HEATMAP_CAP
    assert np.allclose(partial, (1 - t) * 0.5 + t * hot_colors(t))
    assert emit_heatmap(np.zeros((4, 4)), base[..., 0]).shape == (4, 4, 3)


def test_csv_export(tmp_path):
    export_scores([], "csv", tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == HEADER + "\n"
    assert ",".join(SCORE_COLUMNS) == HEADER
    text = format_scores([make_score("a", 1 / 3)])
    assert text.splitlines()[1].split(",")[1] == "0.333333333"


def test_export_round_trip(tmp_path, rng):
    scores = [make_score(f"t{i}", float(v), ssim=float(s), l1=float(v) / 1e3)
              for i, (v, s) in enumerate(zip(rng.random(10) * 300, rng.random(10)))]
    for fmt, name in (("csv", "s.csv"), ("jsonl", "s.jsonl")):
        export_scores(scores, fmt, tmp_path / name)
        back = read_scores(tmp_path / name)
        assert len(back) == 10
        for a, b in zip(scores, back):
            assert (a.pair_id, a.width, a.height, a.config_digest) == (b.pair_id, b.width, b.height, b.config_digest)
            for col in ("sd_max", "sd_mean", "sd_p99", "l1", "l2", "ssim"):
                # 9 significant digits: relative error at most 5e-9
                assert getattr(b, col) == pytest.approx(getattr(a, col), rel=5e-9, abs=0)
    assert len((tmp_path / "s.jsonl").read_text().splitlines()) == 10


def test_read_scores_rejects_bad_header(tmp_path):
    (tmp_path / "x.csv").write_text("pair_id,sd_max\n")
    with pytest.raises(ValueError):
        read_scores(tmp_path / "x.csv")


def test_separation_auroc():
    scores = [make_score("h1", 50, l1=0.01), make_score("h2", 40, l1=0.02),
              make_score("b1", 10, l1=0.2), make_score("b2", 5, l1=0.3)]
    labels = {"h1": "hallucinated", "h2": "hallucinated", "b1": "benign", "b2": "benign"}
    auc = separation_auroc(scores, labels)
    assert auc["sd_max"] == 1.0 and auc["l1"] == 0.0 and auc["1-ssim"] == 0.5
    with pytest.raises(ValueError):
        separation_auroc(scores[:2], labels)
