"""Multi-view camouflage toolkit (scenes, geometry, baselines, evaluation)."""

from ._camo import (
    CamoError,
    CameraView,
    ConfigError,
    DomainError,
    Scene,
    aggregate_study_log,
    eval_crop_size,
    extract_eval_crop,
    fixture_scene,
    load_scene,
    mann_whitney_u,
    positional_encoding,
    render_baseline,
    save_scene,
    split_views,
    test_view_count,
    welch_t_test,
)

__all__ = [
    "CamoError",
    "CameraView",
    "ConfigError",
    "DomainError",
    "Scene",
    "aggregate_study_log",
    "eval_crop_size",
    "extract_eval_crop",
    "fixture_scene",
    "load_scene",
    "mann_whitney_u",
    "positional_encoding",
    "render_baseline",
    "save_scene",
    "split_views",
    "test_view_count",
    "welch_t_test",
]
