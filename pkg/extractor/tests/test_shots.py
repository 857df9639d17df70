"""Shot boundary detection on synthetic clips with planted cuts."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import make_clip

from qsextract.config import ExtractError, ExtractorConfig
from qsextract.shots import detect_shots, hsv_histogram, middle_frames

BLUE = (255, 0, 0)
GREEN = (0, 255, 0)
RED = (0, 0, 255)
WHITE = (255, 255, 255)

CONFIG = ExtractorConfig()


def test_single_scene_yields_one_shot(clip_dir):
    path = clip_dir / "solid.avi"
    total = make_clip(path, [(BLUE, 12)])
    assert detect_shots(path, CONFIG) == [(0, total - 1)]


def test_one_hard_cut_yields_two_shots(clip_dir):
    path = clip_dir / "cut.avi"
    make_clip(path, [(BLUE, 6), (RED, 6)])
    assert detect_shots(path, CONFIG) == [(0, 5), (6, 11)]


def test_three_hard_cuts_yield_exactly_four_shots(clip_dir):
    path = clip_dir / "three_cuts.avi"
    make_clip(path, [(BLUE, 5), (GREEN, 7), (RED, 4), (WHITE, 6)])
    shots = detect_shots(path, CONFIG)
    assert len(shots) == 4
    assert shots == [(0, 4), (5, 11), (12, 15), (16, 21)]


def test_shots_are_contiguous_and_cover_the_clip(clip_dir):
    path = clip_dir / "cover.avi"
    total = make_clip(path, [(BLUE, 3), (RED, 3), (GREEN, 3)])
    shots = detect_shots(path, CONFIG)
    assert shots[0][0] == 0
    assert shots[-1][1] == total - 1
    for (_, left_end), (right_start, _) in zip(shots, shots[1:]):
        assert right_start == left_end + 1
    assert all(start <= end for start, end in shots)


def test_fps_sampling_skips_short_segments(clip_dir):
    # Sampling at 2 fps from a 10 fps clip inspects frames 0, 5, 10, ...;
    # a 2-frame flash at frames 6-7 falls between samples and goes unseen.
    path = clip_dir / "flash.avi"
    make_clip(path, [(BLUE, 6), (RED, 2), (BLUE, 12)])
    config = ExtractorConfig(fps_sample=2.0)
    assert len(detect_shots(path, config)) == 1
    assert len(detect_shots(path, CONFIG)) == 3


def test_undecodable_video_raises(tmp_path):
    path = tmp_path / "not_a_video.avi"
    path.write_bytes(b"this is not video data")
    with pytest.raises(ExtractError):
        detect_shots(path, CONFIG)


def test_missing_video_raises(tmp_path):
    with pytest.raises(ExtractError):
        detect_shots(tmp_path / "absent.avi", CONFIG)


def test_middle_frames_picks_span_centers(clip_dir):
    path = clip_dir / "centers.avi"
    make_clip(path, [(BLUE, 5), (RED, 7)])
    shots = detect_shots(path, CONFIG)
    frames = middle_frames(path, shots)
    assert len(frames) == 2
    # Frame 2 sits inside the blue span, frame 8 inside the red one.
    assert frames[0][0, 0, 0] > 200 and frames[0][0, 0, 2] < 50
    assert frames[1][0, 0, 2] > 200 and frames[1][0, 0, 0] < 50


def test_middle_frames_rejects_out_of_range_shot(clip_dir):
    path = clip_dir / "short.avi"
    make_clip(path, [(BLUE, 4)])
    with pytest.raises(ExtractError):
        middle_frames(path, [(0, 99)])


def test_histogram_is_l1_normalized_and_sized():
    frame = np.zeros((48, 64, 3), dtype=np.uint8)
    hist = hsv_histogram(frame, CONFIG.hsv_bins)
    assert hist.shape == (np.prod(CONFIG.hsv_bins),)
    assert hist.sum() == pytest.approx(1.0)


def test_black_frame_mass_sits_in_lowest_bin():
    frame = np.zeros((48, 64, 3), dtype=np.uint8)
    hist = hsv_histogram(frame, CONFIG.hsv_bins)
    assert hist[0] == pytest.approx(1.0)
    assert np.all(hist[1:] == 0.0)
