"""Extraction configuration and the error type shared across modules."""

from __future__ import annotations

from dataclasses import dataclass


class ExtractError(RuntimeError):
    """Unreadable input, unknown model, or a broken extraction contract."""


@dataclass(frozen=True)
class ExtractorConfig:
    """Knobs for shot detection and feature extraction.

    The emitted feature vector is the CNN penultimate activation followed by
    the flattened HSV histogram, so its length is 4096 + prod(hsv_bins)
    (4352 with the defaults). ``fps_sample <= 0`` samples every frame.
    """

    cnn_model_id: str = "vgg19"
    hsv_bins: tuple[int, int, int] = (16, 4, 4)
    shot_diff_threshold: float = 0.5
    fps_sample: float = 0.0

    def __post_init__(self) -> None:
        if len(self.hsv_bins) != 3 or any(b < 1 for b in self.hsv_bins):
            raise ValueError(f"hsv_bins must be three positive counts, got {self.hsv_bins}")
        if self.shot_diff_threshold <= 0.0:
            # consecutive identical frames have distance 0; a non-positive
            # threshold would cut at every frame
            raise ValueError(
                f"shot_diff_threshold must be positive, got {self.shot_diff_threshold}"
            )

    @property
    def hsv_length(self) -> int:
        return self.hsv_bins[0] * self.hsv_bins[1] * self.hsv_bins[2]
