"""Symmetric similarity-graph container shared by the text and visual sides."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimilarityGraph:
    """Non-negative symmetric affinity matrix over named video nodes."""

    node_ids: tuple[str, ...]
    weights: np.ndarray  # float64, shape (n, n), zero diagonal

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        n = len(self.node_ids)
        if len(set(self.node_ids)) != n:
            raise ValueError("duplicate node ids in similarity graph")
        if weights.shape != (n, n):
            raise ValueError(f"weight matrix shape {weights.shape} does not match {n} nodes")
        if not np.all(np.isfinite(weights)):
            raise ValueError("similarity weights must be finite")
        if np.any(weights < 0):
            raise ValueError("similarity weights must be non-negative")
        if not np.array_equal(weights, weights.T):
            raise ValueError("similarity weights must be symmetric")
        if np.any(np.diagonal(weights) != 0):
            raise ValueError("similarity graph diagonal must be zero")
        object.__setattr__(self, "weights", weights)

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    def degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)
