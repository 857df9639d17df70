"""Shared fixtures: tiny synthetic videos with known cut positions."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np
import pytest

FRAME_SIZE = (64, 48)  # (width, height); small keeps encoding fast
FPS = 10.0


def make_clip(path: Path, segments: list[tuple[tuple[int, int, int], int]]) -> int:
    """Write an MJPG clip of solid-color segments; returns total frame count.

    ``segments`` is a list of ((b, g, r), n_frames) pairs. Solid colors
    survive MJPG compression essentially unchanged, so cut positions and
    histogram distances stay exactly where they were planted.
    """
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"MJPG"), FPS, FRAME_SIZE
    )
    assert writer.isOpened(), f"cannot open video writer for {path}"
    total = 0
    for color, n_frames in segments:
        frame = np.full((FRAME_SIZE[1], FRAME_SIZE[0], 3), color, dtype=np.uint8)
        for _ in range(n_frames):
            writer.write(frame)
        total += n_frames
    writer.release()
    return total


@pytest.fixture()
def clip_dir(tmp_path: Path) -> Path:
    directory = tmp_path / "clips"
    directory.mkdir()
    return directory
