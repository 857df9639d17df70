"""Frame feature contract: length, layout, and determinism."""

from __future__ import annotations

import warnings

import numpy as np
import pytest
from conftest import make_clip

from qsextract.config import ExtractError, ExtractorConfig
from qsextract.features import extract_frame_features, frame_feature, load_backbone
from qsextract.shots import detect_shots

CONFIG = ExtractorConfig()


@pytest.fixture(scope="module")
def backbone():
    with warnings.catch_warnings():
        # Offline environments fall back to seeded random weights; either
        # weight source satisfies the contracts checked here.
        warnings.simplefilter("ignore")
        model, _ = load_backbone(CONFIG.cnn_model_id)
    return model


def test_feature_length_is_4352(backbone):
    frame = np.zeros((48, 64, 3), dtype=np.uint8)
    feature = frame_feature(frame, backbone, CONFIG)
    assert feature.shape == (4096 + 256,)
    assert feature.dtype == np.float32


def test_histogram_occupies_the_tail(backbone):
    frame = np.zeros((48, 64, 3), dtype=np.uint8)
    feature = frame_feature(frame, backbone, CONFIG)
    # A black frame's histogram puts all its mass in the first HSV bin.
    assert feature[4096] == pytest.approx(1.0)
    assert np.all(feature[4097:] == 0.0)


def test_identical_frames_have_near_unit_cosine(backbone):
    rng = np.random.default_rng(7)
    frame = rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8)
    a = frame_feature(frame, backbone, CONFIG)
    b = frame_feature(frame.copy(), backbone, CONFIG)
    cosine = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    assert cosine >= 0.999


def test_feature_is_deterministic(backbone):
    rng = np.random.default_rng(11)
    frame = rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8)
    a = frame_feature(frame, backbone, CONFIG)
    b = frame_feature(frame, backbone, CONFIG)
    assert np.array_equal(a, b)


def test_unknown_model_raises():
    with pytest.raises(ExtractError):
        load_backbone("resnet9000")


def test_extract_frame_features_one_row_per_shot(clip_dir, backbone):
    path = clip_dir / "two_shots.avi"
    make_clip(path, [((255, 0, 0), 5), ((0, 0, 255), 5)])
    shots = detect_shots(path, CONFIG)
    rows, keyframes = extract_frame_features(path, shots, CONFIG)
    assert rows.shape == (len(shots), 4352)
    assert rows.dtype == np.float32
    assert len(keyframes) == len(shots)
    # The two shots show different solid colors, so their histograms differ.
    assert not np.array_equal(rows[0, 4096:], rows[1, 4096:])
