"""Shot boundary detection and middle-frame selection.

A hard cut is declared wherever the L1 distance between the HSV histograms
of consecutive sampled frames exceeds the configured threshold. Shots are
contiguous, non-overlapping frame spans that cover the whole video; the
middle frame of each shot is the candidate keyframe.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .config import ExtractError, ExtractorConfig


def hsv_histogram(frame_bgr: np.ndarray, bins: tuple[int, int, int]) -> np.ndarray:
    """L1-normalized HSV histogram, flattened H-major (OpenCV channel ranges)."""
    hsv = cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2HSV)
    hist = cv2.calcHist([hsv], [0, 1, 2], None, list(bins), [0, 180, 0, 256, 0, 256])
    hist = hist.flatten().astype(np.float64)
    total = hist.sum()
    return hist / total if total > 0 else hist


def _open_video(video_path: Path | str) -> cv2.VideoCapture:
    capture = cv2.VideoCapture(str(video_path))
    if not capture.isOpened():
        raise ExtractError(f"cannot decode video {video_path}")
    return capture


def _sample_step(capture: cv2.VideoCapture, fps_sample: float) -> int:
    if fps_sample <= 0.0:
        return 1
    native = capture.get(cv2.CAP_PROP_FPS) or 0.0
    if native <= 0.0:
        return 1
    return max(1, round(native / fps_sample))


def detect_shots(
    video_path: Path | str, config: ExtractorConfig
) -> list[tuple[int, int]]:
    """Inclusive (start_frame, end_frame) spans covering every frame."""
    capture = _open_video(video_path)
    step = _sample_step(capture, config.fps_sample)
    boundaries: list[int] = []
    previous_hist = None
    frame_number = 0
    sampled = 0
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            if frame_number % step == 0:
                hist = hsv_histogram(frame, config.hsv_bins)
                if previous_hist is not None:
                    distance = float(np.abs(hist - previous_hist).sum())
                    if distance > config.shot_diff_threshold:
                        boundaries.append(frame_number)
                previous_hist = hist
                sampled += 1
            frame_number += 1
    finally:
        capture.release()
    if frame_number == 0:
        raise ExtractError(f"video {video_path} holds no frames")

    starts = [0, *boundaries]
    ends = [*(b - 1 for b in boundaries), frame_number - 1]
    return list(zip(starts, ends))


def middle_frames(
    video_path: Path | str, shots: list[tuple[int, int]]
) -> list[np.ndarray]:
    """The middle frame of each shot, read in one sequential pass.

    Sequential decoding avoids codec-dependent seek behavior, keeping the
    selected pixels deterministic.
    """
    wanted = {(start + end) // 2: index for index, (start, end) in enumerate(shots)}
    frames: dict[int, np.ndarray] = {}
    capture = _open_video(video_path)
    frame_number = 0
    try:
        while len(frames) < len(wanted):
            ok, frame = capture.read()
            if not ok:
                break
            if frame_number in wanted:
                frames[frame_number] = frame.copy()
            frame_number += 1
    finally:
        capture.release()
    if len(frames) < len(wanted):
        raise ExtractError(
            f"video {video_path} ended before frame "
            f"{max(n for n in wanted if n not in frames)}"
        )
    return [frames[number] for number in sorted(wanted, key=wanted.get)]
