"""Keyframe importance scoring via web-guided non-negative sparse coding.

Every candidate keyframe receives one coefficient a_j >= 0 by minimizing

    f(a) = (1/2N) sum_i ||x_i - Xa||^2
         + (1/2L) sum_i rho_i ||z_i - Xa||^2
         + gamma * sum_j a_j

where the columns of X are the N frame features, the z_i are the L web-image
features, and rho_i is each image's adaptive weight (its mean cosine
similarity to all frames). The web term is dropped entirely when L = 0.

Collecting the quadratic pieces gives, with G = X'X, c = 1 + mean(rho),
q = X'(mean(x) + mean-weighted(z)), the equivalent problem

    minimize  -q.a + (c/2) a'Ga + gamma * sum(a)   subject to a >= 0,

solved by cyclic coordinate descent: each coordinate in ascending frame
order takes its closed-form one-sided soft-threshold minimizer

    a_j <- max(0, (q_j - c * sum_{k != j} G_jk a_k - gamma) / (c * G_jj)).

Frames whose feature is all-zero (G_jj = 0) keep a_j = 0. A sweep sequence
terminates once the largest coordinate change falls below the tolerance and
the KKT conditions hold to within ten times the tolerance, or when the
iteration budget runs out.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusError, DataWarning, QueryCorpus


class SolverError(RuntimeError):
    """Raised when the scoring objective is numerically unsound."""


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = 0.005
    tc: float = 0.01
    max_iters: int = 10_000
    tolerance: float = 1e-8

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.tc > 0:
            raise ValueError(f"tc must be positive, got {self.tc}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")


@dataclass(frozen=True)
class ImportanceScores:
    """Solver output: one non-negative score per candidate keyframe."""

    scores: dict[str, float]
    objective_value: float
    iterations_used: int
    converged: bool
    objective_history: tuple[float, ...]  # value at a = 0, then after each sweep


@dataclass(frozen=True)
class Summary:
    """Keyframes whose score clears the threshold, descending by score."""

    keyframes: tuple[tuple[str, float], ...]
    threshold_used: float


def adaptive_weights(corpus: QueryCorpus) -> dict[str, float]:
    """Mean cosine similarity between each web image and all candidate frames.

    Zero-norm frames or images contribute cosine 0 to the averages; each such
    vector is reported once through a DataWarning.
    """
    X = corpus.frame_matrix()
    Z = corpus.web_matrix()
    n = X.shape[1]
    if n == 0:
        raise CorpusError("corpus has no candidate keyframes")
    if Z.shape[1] == 0:
        return {}

    frame_norms = np.linalg.norm(X, axis=0)
    image_norms = np.linalg.norm(Z, axis=0)
    dead_frames = [fid for fid, nn in zip(corpus.frame_ids(), frame_norms) if nn == 0.0]
    dead_images = [im.image_id for im, nn in zip(corpus.web_images, image_norms) if nn == 0.0]
    for entity, ids in (("frame", dead_frames), ("web image", dead_images)):
        if ids:
            warnings.warn(
                f"zero-norm {entity} features treated as cosine 0: {', '.join(ids)}",
                DataWarning,
            )

    safe_f = np.where(frame_norms == 0.0, 1.0, frame_norms)
    safe_i = np.where(image_norms == 0.0, 1.0, image_norms)
    cosines = (Z.T @ X) / np.outer(safe_i, safe_f)
    cosines[image_norms == 0.0, :] = 0.0
    cosines[:, frame_norms == 0.0] = 0.0
    rho = cosines.mean(axis=1)
    return {image.image_id: float(r) for image, r in zip(corpus.web_images, rho)}


def _assemble(corpus: QueryCorpus, weights: dict[str, float]):
    """Build (G, q, c, constant) for the quadratic form of the objective."""
    X = corpus.frame_matrix()
    n = X.shape[1]
    if n == 0:
        raise CorpusError("corpus has no candidate keyframes")

    G = X.T @ X
    target = X.mean(axis=1)
    quad_scale = 1.0
    constant = float((X * X).sum()) / (2.0 * n)

    num_images = corpus.num_web_images
    if num_images:
        try:
            rho = np.array(
                [weights[image.image_id] for image in corpus.web_images], dtype=np.float64
            )
        except KeyError as exc:
            raise CorpusError(f"no adaptive weight for web image {exc.args[0]!r}") from exc
        if np.any(rho < 0):
            bad = [im.image_id for im, r in zip(corpus.web_images, rho) if r < 0]
            warnings.warn(
                f"negative adaptive weights kept as-is: {', '.join(bad)}", DataWarning
            )
        Z = corpus.web_matrix()
        target = target + (Z @ rho) / num_images
        quad_scale = 1.0 + float(rho.sum()) / num_images
        constant += float((rho * (Z * Z).sum(axis=0)).sum()) / (2.0 * num_images)

    if quad_scale <= 0.0:
        raise SolverError(
            f"web-weight mass makes the objective non-convex (1 + mean weight = {quad_scale})"
        )
    q = X.T @ target
    return G, q, quad_scale, constant


def solve(corpus: QueryCorpus, weights: dict[str, float], config: SolverConfig) -> ImportanceScores:
    """Run cyclic coordinate descent from a = 0 until the KKT point is reached.

    Returns the best iterate with ``converged=False`` if the iteration budget
    is exhausted first.
    """
    G, q, quad_scale, constant = _assemble(corpus, weights)
    n = q.size
    gamma = config.gamma
    diag = np.diag(G).copy()

    a = np.zeros(n)
    Ga = np.zeros(n)
    history = [constant]  # objective at a = 0
    kkt_slack = 10.0 * config.tolerance
    converged = False
    sweeps = 0

    for sweeps in range(1, config.max_iters + 1):
        max_delta = 0.0
        for j in range(n):
            gjj = diag[j]
            if gjj == 0.0:
                continue  # all-zero feature column: a_j pinned at 0
            others = Ga[j] - gjj * a[j]
            new = (q[j] - quad_scale * others - gamma) / (quad_scale * gjj)
            if new < 0.0:
                new = 0.0
            delta = new - a[j]
            if delta != 0.0:
                Ga += G[:, j] * delta
                a[j] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        Ga = G @ a  # fresh product: keeps drift out of the objective and KKT
        value = float(constant - q @ a + 0.5 * quad_scale * (a @ Ga) + gamma * a.sum())
        history.append(value)
        if max_delta < config.tolerance:
            gradient = quad_scale * Ga - q + gamma
            active = a > 0.0
            if np.all(np.abs(gradient[active]) <= kkt_slack) and np.all(
                gradient[~active] >= -kkt_slack
            ):
                converged = True
                break

    scores = {fid: float(v) for fid, v in zip(corpus.frame_ids(), a)}
    return ImportanceScores(
        scores=scores,
        objective_value=history[-1],
        iterations_used=sweeps,
        converged=converged,
        objective_history=tuple(history),
    )


def select_keyframes(scores: ImportanceScores, tc: float) -> Summary:
    """Keep frames with score strictly above tc, sorted by score then frame id."""
    if not tc > 0:
        raise ValueError(f"tc must be positive, got {tc}")
    chosen = [(fid, s) for fid, s in scores.scores.items() if s > tc]
    chosen.sort(key=lambda pair: (-pair[1], pair[0]))
    return Summary(keyframes=tuple(chosen), threshold_used=tc)


def objective_value(
    corpus: QueryCorpus, weights: dict[str, float], coefficients, gamma: float
) -> float:
    """Evaluate f(a) directly from the residuals, term by term."""
    X = corpus.frame_matrix()
    n = X.shape[1]
    a = np.asarray(coefficients, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"coefficients must have length {n}, got shape {a.shape}")
    if np.any(a < 0):
        raise ValueError("coefficients must be non-negative")

    reconstruction = X @ a
    value = float(((X - reconstruction[:, None]) ** 2).sum()) / (2.0 * n)
    num_images = corpus.num_web_images
    if num_images:
        try:
            rho = np.array(
                [weights[image.image_id] for image in corpus.web_images], dtype=np.float64
            )
        except KeyError as exc:
            raise CorpusError(f"no adaptive weight for web image {exc.args[0]!r}") from exc
        Z = corpus.web_matrix()
        residuals = ((Z - reconstruction[:, None]) ** 2).sum(axis=0)
        value += float((rho * residuals).sum()) / (2.0 * num_images)
    return value + gamma * float(a.sum())
