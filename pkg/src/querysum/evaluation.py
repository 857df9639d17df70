"""Summary evaluation: greedy matched precision/recall/F and consistency.

Matching compares L2-normalized features with the scaled distance
d(u, v) = ||u/|u| - v/|v|||_2 / 2, which lies in [0, 1]; a pair matches only
when d is strictly below the threshold. Generated keyframes claim truth
frames greedily in descending score order, each consuming its nearest still
unmatched truth frame. Annotator consistency compares raw frame-id sets
between annotators, no features involved.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import DataWarning, GroundTruth, QueryCorpus
from .solver import Summary


@dataclass(frozen=True)
class MatchConfig:
    # A zero threshold is legal and matches nothing: distances are >= 0 and
    # the comparison is strict.
    distance_threshold: float = 0.6
    direction: str = "generated"  # which side drives the greedy matching

    def __post_init__(self) -> None:
        if not 0.0 <= self.distance_threshold <= 1.0:
            raise ValueError(
                f"distance_threshold must be in [0, 1], got {self.distance_threshold}"
            )
        if self.direction not in ("generated", "truth"):
            raise ValueError(f"direction must be 'generated' or 'truth', got {self.direction}")


@dataclass(frozen=True)
class AnnotatorScore:
    n_matched: int
    n_generated: int
    n_truth: int
    precision: float
    recall: float
    f_score: float


@dataclass(frozen=True)
class MetricsReport:
    per_annotator: dict[str, AnnotatorScore]
    average: tuple[float, float, float]  # (precision, recall, f_score)
    degenerate: bool  # true when the generated summary was empty


@dataclass(frozen=True)
class ConsistencyReport:
    per_annotator: dict[str, float]
    minimum: float
    maximum: float
    mean: float


def _unit_feature(corpus_index, frame_id: str) -> np.ndarray | None:
    frame = corpus_index.get(frame_id)
    if frame is None:
        raise ValueError(f"unknown frame id {frame_id!r}")
    vec = frame.feature.astype(np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        warnings.warn(f"zero-norm frame {frame_id!r} can never match", DataWarning)
        return None
    return vec / norm


def match_keyframes(
    generated: Summary, truth: frozenset[str], corpus: QueryCorpus, config: MatchConfig
) -> int:
    """Count greedy one-to-one matches between generated and truth frames.

    The driving side (generated keyframes in descending score order by
    default, or truth frames in ascending id order) claims, one at a time,
    the nearest still-unclaimed frame of the other side at distance strictly
    below the threshold; distance ties prefer the smallest frame id.
    """
    index = corpus.frame_index()
    gen_ids = [fid for fid, _ in sorted(generated.keyframes, key=lambda p: (-p[1], p[0]))]
    truth_ids = sorted(truth)
    if config.direction == "generated":
        drivers, pool_ids = gen_ids, truth_ids
    else:
        drivers, pool_ids = truth_ids, gen_ids

    pool = {fid: _unit_feature(index, fid) for fid in pool_ids}
    matched = 0
    for driver in drivers:
        unit = _unit_feature(index, driver)
        if unit is None:
            continue
        best_id = None
        best_dist = np.inf
        for candidate in sorted(pool):
            vec = pool[candidate]
            if vec is None:
                continue
            dist = float(np.linalg.norm(unit - vec)) / 2.0
            if dist < best_dist:
                best_id, best_dist = candidate, dist
        if best_id is not None and best_dist < config.distance_threshold:
            matched += 1
            del pool[best_id]
    return matched


def prf(
    generated: Summary,
    ground_truth: GroundTruth,
    corpus: QueryCorpus,
    config: MatchConfig,
) -> MetricsReport:
    """Per-annotator precision/recall/F plus their arithmetic means.

    An empty generated summary yields all-zero metrics and is flagged
    degenerate rather than raising.
    """
    if not ground_truth.annotators:
        raise ValueError("ground truth holds no annotators")
    n_generated = len(generated.keyframes)
    degenerate = n_generated == 0

    per: dict[str, AnnotatorScore] = {}
    for annotator_id in sorted(ground_truth.annotators):
        truth = ground_truth.annotators[annotator_id]
        if not truth:
            raise ValueError(f"annotator {annotator_id!r} has an empty selection")
        n_matched = 0 if degenerate else match_keyframes(generated, truth, corpus, config)
        precision = n_matched / n_generated if n_generated else 0.0
        recall = n_matched / len(truth)
        f_score = (
            2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        )
        per[annotator_id] = AnnotatorScore(
            n_matched=n_matched,
            n_generated=n_generated,
            n_truth=len(truth),
            precision=precision,
            recall=recall,
            f_score=f_score,
        )

    count = len(per)
    average = (
        sum(s.precision for s in per.values()) / count,
        sum(s.recall for s in per.values()) / count,
        sum(s.f_score for s in per.values()) / count,
    )
    return MetricsReport(per_annotator=per, average=average, degenerate=degenerate)


def consistency(ground_truth: GroundTruth) -> ConsistencyReport:
    """Mean pairwise F-measure of each annotator's selection against the rest.

    For annotators i and j the pair term is the F-measure of exact frame-id
    overlap, 2|Si & Sj| / (|Si| + |Sj|); each annotator's value averages the
    terms against all others.
    """
    ids = sorted(ground_truth.annotators)
    if len(ids) < 2:
        raise ValueError(f"consistency needs at least 2 annotators, got {len(ids)}")
    sets = {aid: ground_truth.annotators[aid] for aid in ids}
    for aid, selection in sets.items():
        if not selection:
            raise ValueError(f"annotator {aid!r} has an empty selection")

    per: dict[str, float] = {}
    for aid in ids:
        terms = []
        for other in ids:
            if other == aid:
                continue
            overlap = len(sets[aid] & sets[other])
            precision = overlap / len(sets[aid])
            recall = overlap / len(sets[other])
            terms.append(
                2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
            )
        per[aid] = sum(terms) / len(terms)

    values = list(per.values())
    return ConsistencyReport(
        per_annotator=per,
        minimum=min(values),
        maximum=max(values),
        mean=sum(values) / len(values),
    )
