"""Event discovery: graph fusion, normalized-cut partition, labels, assembly.

Videos are grouped into events by fusing the visual and textual similarity
graphs, running normalized-cut spectral clustering on the fused graph, and
labeling each event with the representative words of its highest-weight
TF-IDF clusters. The assembled result arranges the selected keyframes as an
event-level storyline: events ordered by earliest upload time, keyframes
inside an event by upload time and play order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import QueryCorpus
from .graph import SimilarityGraph
from .kmeans import kmeans
from .solver import Summary
from .textgraph import TfidfVector, TokenizedDoc, WordClustering

MAX_LABEL_WORDS = 10


@dataclass(frozen=True)
class FusionConfig:
    alpha: float = 0.7
    k_events: int | str = "auto"

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.k_events != "auto" and (
            not isinstance(self.k_events, int) or self.k_events < 1
        ):
            raise ValueError(f"k_events must be 'auto' or a positive integer, got {self.k_events}")


@dataclass(frozen=True)
class KeyframeRef:
    frame_id: str
    video_id: str
    score: float


@dataclass(frozen=True)
class EventGroup:
    event_id: int
    label_words: tuple[str, ...]
    video_ids: frozenset[str]
    keyframes: tuple[KeyframeRef, ...]


@dataclass(frozen=True)
class EventSummary:
    query: str
    events: tuple[EventGroup, ...]


def fuse_graphs(
    visual: SimilarityGraph, textual: SimilarityGraph, alpha: float
) -> SimilarityGraph:
    """Convex combination alpha * visual + (1 - alpha) * textual."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if visual.node_ids != textual.node_ids:
        raise ValueError(
            "graph node sets differ: "
            f"visual={list(visual.node_ids)} textual={list(textual.node_ids)}"
        )
    fused = alpha * visual.weights + (1.0 - alpha) * textual.weights
    return SimilarityGraph(node_ids=visual.node_ids, weights=fused)


def _auto_k(eigenvalues: np.ndarray, n: int) -> int:
    """Largest eigengap among the first min(10, n) eigenvalues, clamped to [2, 10]."""
    window = eigenvalues[: min(10, n)]
    gaps = np.diff(window)
    k = int(np.argmax(gaps)) + 1 if gaps.size else 1
    return min(max(k, 2), 10, n)


def graph_cut(graph: SimilarityGraph, k_events: int | str, seed: int) -> dict[str, int]:
    """Partition video nodes by normalized-cut spectral clustering.

    Uses the symmetric normalized Laplacian, row-normalized bottom
    eigenvectors, and seeded k-means on the embedded rows. Nodes with zero
    degree carry no similarity evidence and each become their own event,
    appended after the spectral clusters. An explicit ``k_events`` counts
    total events, so the spectral side gets ``k_events`` minus the number
    of isolated nodes; when the isolated nodes alone exceed that budget
    the result holds more events than requested. With ``k_events='auto'``
    the spectral cluster count comes from the largest eigengap among the
    first min(10, n) eigenvalues, clamped to [2, 10].
    """
    n = graph.num_nodes
    if n < 2:
        raise ValueError(f"graph cut needs at least 2 nodes, got {n}")
    if k_events != "auto":
        if not isinstance(k_events, int) or k_events < 1:
            raise ValueError(f"k_events must be 'auto' or a positive integer, got {k_events}")
        if k_events > n:
            raise ValueError(f"k_events={k_events} exceeds the {n} video nodes")

    degrees = graph.degrees()
    active = np.flatnonzero(degrees > 0.0)
    isolated = np.flatnonzero(degrees == 0.0)

    partition: dict[str, int] = {}
    next_id = 0
    if active.size == 1:
        partition[graph.node_ids[active[0]]] = 0
        next_id = 1
    elif active.size >= 2:
        sub = graph.weights[np.ix_(active, active)]
        inv_sqrt = 1.0 / np.sqrt(sub.sum(axis=1))
        laplacian = np.eye(active.size) - sub * inv_sqrt[:, None] * inv_sqrt[None, :]
        laplacian = (laplacian + laplacian.T) / 2.0
        eigenvalues, eigenvectors = np.linalg.eigh(laplacian)

        if k_events == "auto":
            k = _auto_k(eigenvalues, active.size)
        else:
            k = min(max(int(k_events) - isolated.size, 1), active.size)
        embedding = eigenvectors[:, :k]
        row_norms = np.linalg.norm(embedding, axis=1)
        embedding = embedding / np.where(row_norms == 0.0, 1.0, row_norms)[:, None]
        labels, _ = kmeans(embedding, k, seed)
        for node, label in zip(active, labels):
            partition[graph.node_ids[node]] = int(label)
        next_id = k

    for node in isolated:
        partition[graph.node_ids[node]] = next_id
        next_id += 1
    return partition


def label_events(
    partition: dict[str, int],
    tfidf_vectors: list[TfidfVector],
    clustering: WordClustering,
    docs: list[TokenizedDoc],
) -> dict[int, tuple[str, ...]]:
    """Label each event with up to ten representative words.

    Word-cluster weights are summed over the event's TF-IDF vectors; each of
    the top clusters contributes its member word with the highest document
    frequency (ties alphabetical). Events whose documents are all empty get
    an empty label.
    """
    missing = [vec.video_id for vec in tfidf_vectors if vec.video_id not in partition]
    if missing:
        raise ValueError(f"partition does not cover videos: {', '.join(missing)}")

    doc_freq: dict[str, int] = {}
    for doc in docs:
        for token in set(doc.tokens):
            doc_freq[token] = doc_freq.get(token, 0) + 1

    representative: dict[int, str] = {}
    for word in sorted(clustering.assignment):
        cluster = clustering.assignment[word]
        best = representative.get(cluster)
        if best is None or doc_freq.get(word, 0) > doc_freq.get(best, 0):
            representative[cluster] = word

    sums: dict[int, dict[int, float]] = {}
    for vec in tfidf_vectors:
        event = partition[vec.video_id]
        bucket = sums.setdefault(event, {})
        for cluster, weight in vec.weights.items():
            bucket[cluster] = bucket.get(cluster, 0.0) + weight

    labels: dict[int, tuple[str, ...]] = {}
    for event in sorted(set(partition.values())):
        bucket = sums.get(event, {})
        top = sorted(bucket.items(), key=lambda item: (-item[1], item[0]))
        labels[event] = tuple(
            representative[cluster] for cluster, _ in top[:MAX_LABEL_WORDS]
        )
    return labels


def assemble_ekp(
    summary: Summary,
    partition: dict[str, int],
    labels: dict[int, tuple[str, ...]],
    corpus: QueryCorpus,
) -> EventSummary:
    """Arrange selected keyframes into ordered event groups.

    Only events holding at least one selected keyframe appear. Events are
    ordered by the earliest upload time among their member videos, ties by
    smallest member video id; keyframes inside an event by upload time,
    video id, then play order.
    """
    frame_index = corpus.frame_index()
    video_index = corpus.video_index()

    members: dict[int, set[str]] = {}
    for video_id, event in partition.items():
        if video_id not in video_index:
            raise ValueError(f"partition references unknown video {video_id!r}")
        members.setdefault(event, set()).add(video_id)

    buckets: dict[int, list[KeyframeRef]] = {}
    for frame_id, score in summary.keyframes:
        frame = frame_index.get(frame_id)
        if frame is None:
            raise ValueError(f"summary references unknown frame {frame_id!r}")
        event = partition.get(frame.video_id)
        if event is None:
            raise ValueError(f"video {frame.video_id!r} missing from the event partition")
        buckets.setdefault(event, []).append(
            KeyframeRef(frame_id=frame_id, video_id=frame.video_id, score=score)
        )

    def frame_key(ref: KeyframeRef):
        return (
            video_index[ref.video_id].upload_time,
            ref.video_id,
            frame_index[ref.frame_id].play_order,
        )

    groups = []
    for event, refs in buckets.items():
        refs.sort(key=frame_key)
        groups.append(
            EventGroup(
                event_id=event,
                label_words=tuple(labels.get(event, ())),
                video_ids=frozenset(members[event]),
                keyframes=tuple(refs),
            )
        )

    def event_key(group: EventGroup):
        return (
            min(video_index[v].upload_time for v in group.video_ids),
            min(group.video_ids),
        )

    groups.sort(key=event_key)
    return EventSummary(query=corpus.query, events=tuple(groups))
