"""Textual similarity graph over videos, built from their tag text.

Pipeline: tokenize tag text, cluster word embeddings so near-synonyms share a
term, compute TF-IDF over the word clusters, then connect videos with a
Gaussian kernel on cosine distance between their TF-IDF vectors.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import SimilarityGraph
from .kmeans import kmeans

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Deliberately small: tag text is short, so only the most common function
# words are worth dropping by default. Callers can pass their own set.
DEFAULT_STOPWORDS = frozenset(
    """
    a an and are as at be but by for from has have if in into is it its of on
    or that the their then there these this to was were will with vs
    """.split()
)


@dataclass(frozen=True)
class TokenizedDoc:
    video_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class WordClustering:
    """Word-to-cluster assignment; words without embeddings become singletons."""

    assignment: dict[str, int]
    k_words: int  # number of learned (embedding-backed) clusters
    centroids: np.ndarray | None  # (k_words, d_w); None for the identity clustering

    @classmethod
    def identity(cls, vocab) -> "WordClustering":
        """Each word is its own cluster; used when no embeddings are available."""
        words = sorted(vocab)
        if not words:
            raise ValueError("empty vocabulary")
        return cls(
            assignment={word: i for i, word in enumerate(words)},
            k_words=len(words),
            centroids=None,
        )


@dataclass(frozen=True)
class TfidfVector:
    video_id: str
    weights: dict[int, float]  # cluster id -> weight, zeros unstored


def load_stopwords(path: Path | str) -> frozenset[str]:
    """Read one stopword per line; blank lines ignored."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip().lower() for line in lines if line.strip())


def tokenize(
    corpus,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    fields: tuple[str, ...] = ("title", "description"),
) -> list[TokenizedDoc]:
    """One document per video: lowercase, split on non-alphanumeric runs,
    drop stopwords and single-character tokens."""
    docs = []
    for video in corpus.videos:
        text = " ".join(getattr(video, field) for field in fields)
        tokens = [
            tok
            for tok in _TOKEN_RE.findall(text.lower())
            if len(tok) >= 2 and tok not in stopwords
        ]
        docs.append(TokenizedDoc(video_id=video.video_id, tokens=tuple(tokens)))
    return docs


def default_k_words(vocab_size: int) -> int:
    return min(50, max(2, vocab_size // 10))


def cluster_words(
    vocab, vectors: dict[str, np.ndarray], k_words: int, seed: int
) -> WordClustering:
    """Group embedding-backed words into k_words clusters via seeded k-means.

    Words missing from ``vectors`` get singleton cluster ids k_words,
    k_words + 1, ... in alphabetical order.
    """
    words = sorted(vocab)
    if not words:
        raise ValueError("empty vocabulary")
    backed = [word for word in words if word in vectors]
    if not 1 <= k_words <= len(backed):
        raise ValueError(
            f"k_words must be in [1, {len(backed)}] (words with embeddings), got {k_words}"
        )
    points = np.stack([vectors[word] for word in backed])
    labels, centroids = kmeans(points, k_words, seed)
    assignment = {word: int(label) for word, label in zip(backed, labels)}
    next_id = k_words
    for word in words:
        if word not in assignment:
            assignment[word] = next_id
            next_id += 1
    return WordClustering(assignment=assignment, k_words=k_words, centroids=centroids)


def tfidf(docs: list[TokenizedDoc], clustering: WordClustering) -> list[TfidfVector]:
    """TF-IDF over word clusters: tf = count/len(doc), idf = ln((1+M)/(1+df)) + 1."""
    if not docs:
        raise ValueError("no documents")
    num_docs = len(docs)

    doc_counts: list[Counter] = []
    for doc in docs:
        counts: Counter = Counter()
        for token in doc.tokens:
            cluster = clustering.assignment.get(token)
            if cluster is None:
                raise ValueError(f"token {token!r} missing from the word clustering")
            counts[cluster] += 1
        doc_counts.append(counts)

    doc_freq: Counter = Counter()
    for counts in doc_counts:
        doc_freq.update(counts.keys())

    vectors = []
    for doc, counts in zip(docs, doc_counts):
        length = len(doc.tokens)
        weights = {}
        for cluster, count in counts.items():
            idf = math.log((1 + num_docs) / (1 + doc_freq[cluster])) + 1.0
            weights[cluster] = (count / length) * idf
        vectors.append(TfidfVector(video_id=doc.video_id, weights=weights))
    return vectors


def textual_graph(
    tfidf_vectors: list[TfidfVector], sigma: float | None = None
) -> SimilarityGraph:
    """Gaussian kernel on cosine distance between video TF-IDF vectors.

    ``sigma=None`` uses the median of the off-diagonal distances; a median of
    0 (all documents identical) falls back to sigma = 1. An all-zero TF-IDF
    vector sits at distance 1 from everything.
    """
    n = len(tfidf_vectors)
    if n < 2:
        raise ValueError(f"textual graph needs at least 2 videos, got {n}")
    node_ids = tuple(vec.video_id for vec in tfidf_vectors)

    clusters = sorted({c for vec in tfidf_vectors for c in vec.weights})
    column = {c: i for i, c in enumerate(clusters)}
    dense = np.zeros((n, max(len(clusters), 1)))
    for row, vec in enumerate(tfidf_vectors):
        for cluster, weight in vec.weights.items():
            dense[row, column[cluster]] = weight

    norms = np.linalg.norm(dense, axis=1)
    distance = np.ones((n, n))
    np.fill_diagonal(distance, 0.0)
    for i in range(n):
        for j in range(i + 1, n):
            if norms[i] > 0 and norms[j] > 0:
                cos = float(dense[i] @ dense[j]) / (norms[i] * norms[j])
                distance[i, j] = distance[j, i] = max(1.0 - cos, 0.0)

    if sigma is None:
        off_diag = distance[~np.eye(n, dtype=bool)]
        sigma = float(np.median(off_diag))
        if sigma == 0.0:
            sigma = 1.0
    elif not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    weights = np.exp(-(distance**2) / (2.0 * sigma * sigma))
    np.fill_diagonal(weights, 0.0)
    weights = (weights + weights.T) / 2.0  # exact symmetry against rounding
    return SimilarityGraph(node_ids=node_ids, weights=weights)
