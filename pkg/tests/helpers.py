"""Corpus builders shared across the test suite.

``build_corpus`` assembles in-memory corpora from plain feature lists;
``write_corpus_dir`` materializes the same structure on disk with its own
blob writer, independent of the package's serialization code.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from querysum.corpus import CandidateKeyframe, QueryCorpus, VideoRecord, WebImage


def _frame_entries(video_id, entries):
    for order, entry in enumerate(entries):
        if isinstance(entry, tuple):
            frame_id, values = entry
        else:
            frame_id, values = f"{video_id}_f{order}", entry
        yield order, frame_id, np.asarray(values, dtype=np.float32)


def build_corpus(
    frames_by_video: dict,
    web_images: dict | None = None,
    query: str = "royal wedding",
    video_meta: dict | None = None,
    word_vectors: dict | None = None,
) -> QueryCorpus:
    """In-memory corpus; frame entries are feature lists or (frame_id, feature)."""
    videos = []
    dimension = None
    for video_id, entries in frames_by_video.items():
        frames = []
        for order, frame_id, feature in _frame_entries(video_id, entries):
            dimension = feature.size if dimension is None else dimension
            frames.append(CandidateKeyframe(frame_id, video_id, order, order, feature))
        meta = (video_meta or {}).get(video_id, {})
        videos.append(
            VideoRecord(
                video_id=video_id,
                title=meta.get("title", ""),
                description=meta.get("description", ""),
                upload_time=meta.get("upload_time", 0),
                frames=tuple(frames),
            )
        )
    images = tuple(
        WebImage(image_id, np.asarray(values, dtype=np.float32))
        for image_id, values in (web_images or {}).items()
    )
    return QueryCorpus(
        query=query,
        dimension=int(dimension),
        videos=tuple(videos),
        web_images=images,
        word_vectors=word_vectors,
    )


def corpus_from_matrices(X: np.ndarray, Z: np.ndarray | None = None, query: str = "query") -> QueryCorpus:
    """Single-video corpus whose frame features are the columns of X."""
    frames = {"v1": [X[:, j] for j in range(X.shape[1])]}
    web = None
    if Z is not None and Z.size:
        web = {f"w{i}": Z[:, i] for i in range(Z.shape[1])}
    return build_corpus(frames, web, query=query)


def write_blob(path: Path, rows) -> None:
    """QFV1 writer independent of the package implementation."""
    rows = np.ascontiguousarray(rows, dtype="<f4")
    path.write_bytes(b"QFV1" + struct.pack("<II", rows.shape[0], rows.shape[1]) + rows.tobytes())


def write_corpus_dir(
    root: Path,
    frames_by_video: dict,
    web_images: dict | None = None,
    query: str = "royal wedding",
    video_meta: dict | None = None,
    word_vector_lines: list[str] | None = None,
    dimension: int | None = None,
    manifest_extra: dict | None = None,
) -> Path:
    """Write blobs plus manifest by hand; returns the manifest path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"query": query, "dimension": 0, "videos": []}
    for video_id, entries in frames_by_video.items():
        frame_ids = []
        features = []
        for _, frame_id, feature in _frame_entries(video_id, entries):
            frame_ids.append(frame_id)
            features.append(feature)
        dimension = features[0].size if dimension is None else dimension
        blob_name = f"{video_id}.qfv"
        write_blob(root / blob_name, np.stack(features))
        meta = (video_meta or {}).get(video_id, {})
        manifest["videos"].append(
            {
                "video_id": video_id,
                "title": meta.get("title", ""),
                "description": meta.get("description", ""),
                "upload_time": meta.get("upload_time", 0),
                "frames": frame_ids,
                "features": blob_name,
            }
        )
    manifest["dimension"] = int(dimension)
    if web_images:
        ids = list(web_images)
        write_blob(
            root / "web.qfv",
            np.stack([np.asarray(web_images[i], dtype=np.float32) for i in ids]),
        )
        manifest["web_images"] = {"ids": ids, "features": "web.qfv"}
    if word_vector_lines is not None:
        (root / "words.txt").write_text("\n".join(word_vector_lines) + "\n", encoding="utf-8")
        manifest["word_vectors"] = "words.txt"
    if manifest_extra:
        manifest.update(manifest_extra)
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return manifest_path


PLANTED_TOPIC_WORDS = [
    ["wedding", "ceremony", "abbey", "bride", "procession"],
    ["protest", "march", "square", "crowd", "banners"],
    ["match", "finals", "stadium", "players", "score"],
]


def planted_corpus(
    per_topic: int = 5, frames_per_video: int = 3, noise: float = 0.05, seed: int = 7
) -> QueryCorpus:
    """Corpus with three planted topics, separable both visually and textually.

    Video features sit near one of three orthogonal unit directions (plus a
    little noise in spare dimensions), keeping within-topic cosines above 0.99
    and cross-topic cosines near 0. Tag words come from disjoint per-topic
    pools. Video id ``t<topic>v<index>`` encodes the true topic.
    """
    rng = np.random.default_rng(seed)
    num_topics = len(PLANTED_TOPIC_WORDS)
    dim = num_topics + 3
    frames_by_video: dict = {}
    video_meta: dict = {}
    for topic in range(num_topics):
        base = np.zeros(dim)
        base[topic] = 1.0
        words = PLANTED_TOPIC_WORDS[topic]
        for v in range(per_topic):
            video_id = f"t{topic}v{v}"
            features = []
            for _ in range(frames_per_video):
                jitter = np.zeros(dim)
                jitter[num_topics:] = rng.normal(0.0, 1.0, dim - num_topics)
                jitter /= np.linalg.norm(jitter)
                features.append(base + noise * jitter)
            frames_by_video[video_id] = features
            video_meta[video_id] = {
                "title": " ".join(words[(v + k) % len(words)] for k in range(3)),
                "description": words[(v + 3) % len(words)],
                "upload_time": 100 * topic + v,
            }
    return build_corpus(frames_by_video, query="planted events", video_meta=video_meta)


def planted_topic(video_id: str) -> int:
    return int(video_id[1])
