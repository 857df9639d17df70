"""Visual similarity graph over videos from near-duplicate keyframe counts.

Two frames are near-duplicates when the cosine similarity of their features
reaches tau_nd. Each video pair's edge weight is the near-duplicate pair
count divided by the mean of the two frame counts, clamped to [0, 1].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import DataWarning, QueryCorpus, VideoRecord
from .graph import SimilarityGraph


@dataclass(frozen=True)
class NearDuplicateConfig:
    tau_nd: float = 0.9

    def __post_init__(self) -> None:
        if not 0.0 < self.tau_nd <= 1.0:
            raise ValueError(f"tau_nd must be in (0, 1], got {self.tau_nd}")


def _unit_columns(video: VideoRecord) -> np.ndarray:
    """Frame features as L2-normalized float64 columns; zero-norm frames warn
    and stay zero, so they never count as near-duplicates."""
    matrix = np.stack([f.feature.astype(np.float64) for f in video.frames], axis=1)
    norms = np.linalg.norm(matrix, axis=0)
    dead = [f.frame_id for f, nn in zip(video.frames, norms) if nn == 0.0]
    if dead:
        warnings.warn(
            f"zero-norm frame features never match as near-duplicates: {', '.join(dead)}",
            DataWarning,
        )
    return matrix / np.where(norms == 0.0, 1.0, norms)


def near_duplicate_count(
    video_a: VideoRecord, video_b: VideoRecord, config: NearDuplicateConfig
) -> int:
    """Number of cross-video frame pairs with cosine similarity >= tau_nd."""
    cosines = _unit_columns(video_a).T @ _unit_columns(video_b)
    return int((cosines >= config.tau_nd).sum())


def visual_graph(corpus: QueryCorpus, config: NearDuplicateConfig) -> SimilarityGraph:
    """Pairwise near-duplicate rates between all videos of the corpus."""
    videos = corpus.videos
    n = len(videos)
    if n < 2:
        raise ValueError(f"visual graph needs at least 2 videos, got {n}")

    units = [_unit_columns(video) for video in videos]
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            count = int((units[i].T @ units[j] >= config.tau_nd).sum())
            pair_size = (len(videos[i].frames) + len(videos[j].frames)) / 2.0
            weights[i, j] = weights[j, i] = min(count / pair_size, 1.0)
    return SimilarityGraph(node_ids=tuple(v.video_id for v in videos), weights=weights)
