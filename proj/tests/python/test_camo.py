import json

import numpy as np
import pytest
from scipy import stats

import camo


@pytest.fixture(scope="module")
def scene():
    return camo.split_views(camo.fixture_scene(height=64, width=96), 0)


def test_scene_structure(scene):
    assert len(scene.views) == 8
    assert scene.view_indices("test") == [i for i, v in enumerate(scene.views) if v.role == "test"]
    assert len(scene.view_indices("test")) == camo.test_view_count(8) == 1
    img = scene.views[0].image
    assert img.shape == (64, 96, 3)
    assert img.dtype == np.float32
    assert 0.0 <= img.min() and img.max() <= 1.0


def test_projection_matches_pinhole_formula(scene):
    rng = np.random.default_rng(0)
    v = scene.views[3]
    K, R, t = np.asarray(v.K), np.asarray(v.R), np.asarray(v.t)
    for _ in range(50):
        x = rng.uniform(-1.0, 1.0, 3)
        cam = R @ x + t
        pix, depth = v.project(x)
        ref = (K @ cam)[:2] / cam[2]
        assert np.allclose(pix, ref, atol=1e-9)
        assert depth == pytest.approx(cam[2])
        assert np.allclose(v.unproject(pix, depth), x, atol=1e-9)


def test_positional_encoding_formula():
    x = np.array([0.3, -0.7, 0.1])
    enc = np.asarray(camo.positional_encoding(x, 4))
    parts = [x]
    for k in range(4):
        parts += [np.sin(2.0**k * np.pi * x), np.cos(2.0**k * np.pi * x)]
    assert enc.shape == (3 + 6 * 4,)
    assert np.allclose(np.sort(enc), np.sort(np.concatenate(parts)), atol=1e-12)


def test_eval_crop_size():
    for d in range(1, 513):
        assert camo.eval_crop_size(d) == 32 * int(np.ceil(d / 32)) + 32
    with pytest.raises(camo.DomainError):
        camo.eval_crop_size(0)


def test_baseline_render_leaves_background_untouched(scene):
    view = scene.view_indices("test")[0]
    img, mask = camo.render_baseline("mean", scene, view, atlas_resolution=32)
    bg = scene.views[view].image
    assert img.shape == bg.shape and mask.shape == bg.shape[:2]
    assert mask.any()
    assert np.array_equal(img[~mask], bg[~mask])
    again, _ = camo.render_baseline("mean", scene, view, atlas_resolution=32)
    assert np.array_equal(img, again)
    with pytest.raises(camo.ConfigError):
        camo.render_baseline("nope", scene, view)


def test_tests_agree_with_scipy():
    rng = np.random.default_rng(3)
    a = rng.normal(0.0, 1.0, 40)
    b = rng.normal(0.4, 1.5, 55)
    t = camo.welch_t_test(list(a), list(b))
    ref = stats.ttest_ind(a, b, equal_var=False)
    assert t["statistic"] == pytest.approx(ref.statistic, rel=1e-9)
    assert t["p_value"] == pytest.approx(ref.pvalue, rel=1e-6)
    u = camo.mann_whitney_u(list(a), list(b))
    ref = stats.mannwhitneyu(a, b, use_continuity=True, alternative="two-sided", method="asymptotic")
    assert u["statistic"] == pytest.approx(ref.statistic)
    assert u["p_value"] == pytest.approx(ref.pvalue, rel=1e-6)


def test_study_log_aggregation(tmp_path):
    log = tmp_path / "log.jsonl"
    lines = []
    for method, misses in (("a", 3), ("b", 6)):
        for i in range(10):
            hit = i >= misses
            lines.append(json.dumps({"event": "response", "response": {
                "trial_id": f"{method}{i}", "participant_id": f"p{i}", "scene_id": "s", "method": method,
                "is_training": False, "click": [1.0, 2.0] if hit else None, "time_to_click": 3.0 + i,
                "hit": hit, "client_elapsed": 3.0 + i}}))
    log.write_text("\n".join(lines) + "\n")
    rows = camo.aggregate_study_log(log)
    assert [r["method"] for r in rows] == ["a", "b"]
    assert rows[0]["confusion"] == pytest.approx(0.3)
    assert rows[1]["confusion"] == pytest.approx(0.6)
    assert rows[0]["n"] == 10
