import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import FunctionTransformer, make_pipeline

from halluscreen.sd_core import SdConfig, StructureDiscrepancy, aggregate, sd_map
from halluscreen.synthgen import make_corpus


@pytest.fixture(scope="module")
def pairs():
    return [(a, b) for a, b, _ in make_corpus(2, 2, seed=8, size=64)]


def test_params_round_trip():
    est = StructureDiscrepancy(m_threshold=0.3, kernel_size=16)
    params = est.get_params()
    assert params["m_threshold"] == 0.3 and params["kernel_size"] == 16
    assert clone(est).get_params() == params
    est.set_params(aggregation="mean")
    assert est.config == SdConfig(m_threshold=0.3, kernel_size=16, aggregation="mean")


def test_invalid_params_surface_on_use(pairs):
    est = StructureDiscrepancy(m_threshold=-1)
    with pytest.raises(ValueError):
        est.fit()
    with pytest.raises(ValueError):
        est.transform(pairs)


def test_transform_matches_functional(pairs):
    est = StructureDiscrepancy()
    rows = est.fit(pairs).transform(pairs)
    assert rows.shape == (4, 3)
    for (a, b), row in zip(pairs, rows):
        m = sd_map(a, b)
        assert row.tolist() == [aggregate(m, "max"), aggregate(m, "mean"), aggregate(m, "p99")]
    assert list(est.get_feature_names_out()) == ["sd_max", "sd_mean", "sd_p99"]
    assert np.array_equal(est.score_pairs(pairs), rows[:, 0])


def test_accepts_stacked_array(pairs):
    stacked = np.stack([np.stack(p) for p in pairs])
    est = StructureDiscrepancy()
    assert np.array_equal(est.transform(stacked), est.transform(pairs))
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 3, 8, 8)))


def test_usable_without_fit_and_in_pipeline(pairs):
    assert StructureDiscrepancy().transform(pairs).shape == (4, 3)
    pipe = make_pipeline(StructureDiscrepancy(kernel_size=8), FunctionTransformer(np.log1p))
    out = pipe.fit_transform(pairs)
    assert out.shape == (4, 3) and np.all(out >= 0)


def test_score_map(pairs):
    a, b = pairs[0]
    est = StructureDiscrepancy(clamp_structure=True)
    assert np.array_equal(est.score_map(a, b), sd_map(a, b, SdConfig(clamp_structure=True)))
