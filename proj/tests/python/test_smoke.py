"""End-to-end smoke tests for the python bindings."""

import numpy as np
import pytest

import cytrace


def test_scenario_names():
    names = cytrace.scenario_names()
    assert names == ["static", "drifting", "brownian-dense", "mitosis-heavy", "churn"]


def test_simulate_shapes_and_determinism():
    out = cytrace.simulate("static", seed=42)
    masks = out["masks"]
    intensity = out["intensity"]
    assert masks.shape == (30, 128, 128)
    assert masks.dtype == np.uint32
    assert intensity.shape == masks.shape
    assert intensity.dtype == np.float64
    assert intensity.min() >= 0.0 and intensity.max() <= 1.0
    assert len(out["tracks"]) == 8
    for label, begin, end, parent in out["tracks"]:
        assert label >= 1 and begin == 0 and end == 29 and parent == 0

    again = cytrace.simulate("static", seed=42)
    assert np.array_equal(out["masks"], again["masks"])
    assert np.array_equal(out["intensity"], again["intensity"])

    with pytest.raises(cytrace.ValidationError):
        cytrace.simulate("no-such-preset")


def test_encode_positions_manual():
    pts = np.array([[10.0, 10.0], [13.0, 14.0], [16.0, 18.0]])
    enc = cytrace.encode_positions(pts, n=2, width=100, height=100)
    assert enc.shape == (3, 4)
    # nearest neighbour of the first point is the second, then the third
    assert enc[0].tolist() == [0.03, 0.04, 0.06, 0.08]

    lonely = cytrace.encode_positions(np.array([[5.0, 5.0]]), n=4, width=64, height=64)
    assert lonely.tolist() == [[0.0] * 8]

    with pytest.raises(cytrace.ValidationError):
        cytrace.encode_positions(np.zeros((2, 3)), n=2)


def test_pipeline_round_trip(tmp_path):
    gt = str(tmp_path / "gt")
    model = str(tmp_path / "model.json")
    res = str(tmp_path / "res")

    sim = cytrace.simulate("drifting", seed=7, out=gt)
    history = cytrace.train(gt, model, epochs=2, seed=3)
    assert len(history) == 2
    assert all(np.isfinite(history))

    tracks = cytrace.track(gt, model, res)
    assert len(tracks) >= len(sim["tracks"])
    labels = [t[0] for t in tracks]
    assert labels == sorted(labels)

    identity = cytrace.evaluate(gt, gt)
    assert identity["SEG"] == 1.0
    assert identity["DET"] == 1.0
    assert identity["TRA"] == 1.0

    scored = cytrace.evaluate(gt, res)
    assert 0.0 <= scored["TRA"] <= 1.0
    assert set(scored["ops"]) == {"NS", "FN", "FP", "ED", "EA", "EC"}

    with pytest.raises(cytrace.ValidationError):
        cytrace.evaluate(gt, str(tmp_path / "missing"))


def test_pair_score_symmetry(tmp_path):
    gt = str(tmp_path / "gt")
    model = str(tmp_path / "model.json")
    cytrace.simulate("static", seed=1, out=gt)
    cytrace.train(gt, model, epochs=1)

    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, size=8).tolist()
    b = rng.uniform(-1, 1, size=8).tolist()
    sab = cytrace.pair_score(model, a, b, kind="visual")
    sba = cytrace.pair_score(model, b, a, kind="visual")
    assert sab == sba
    assert 0.0 < sab < 1.0
    # a self pair has zero feature distance, so every self pair scores the same
    c = rng.uniform(-1, 1, size=8).tolist()
    saa = cytrace.pair_score(model, a, a, kind="spatial")
    scc = cytrace.pair_score(model, c, c, kind="spatial")
    assert saa == scc
    assert 0.0 < saa < 1.0

    with pytest.raises(cytrace.ValidationError):
        cytrace.pair_score(model, a, b, kind="nope")
    with pytest.raises(cytrace.DimensionError):
        cytrace.pair_score(model, a[:3], b, kind="visual")
