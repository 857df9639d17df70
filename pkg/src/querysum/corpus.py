"""Corpus data model and on-disk interchange formats.

A query corpus bundles everything one summarization run needs: candidate
keyframes per video with their feature vectors, web images retrieved for the
same query, tag text, and optionally word embeddings. Multi-annotator ground
truth lives in a separate file and is validated against the corpus it scores.

On-disk layout, tied together by a JSON manifest:

* feature blobs: binary, magic ``QFV1``, two little-endian uint32 header
  words (row count, dimension), then row-major little-endian float32 data;
* word vectors: UTF-8 text, one ``token v1 v2 ... v_dw`` line per word;
* ground truth: JSON object mapping annotator id to a list of frame ids.

All paths inside a manifest are resolved relative to the manifest file.
Loaded objects are frozen; nothing mutates a corpus after construction.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

QFV1_MAGIC = b"QFV1"
_QFV1_HEADER = struct.Struct("<II")


class CorpusError(ValueError):
    """Raised when corpus files are missing, malformed, or inconsistent."""


class DataWarning(UserWarning):
    """Non-fatal data pathology, e.g. zero-norm features or negative weights."""


@dataclass(frozen=True)
class CandidateKeyframe:
    frame_id: str
    video_id: str
    shot_index: int
    play_order: int
    feature: np.ndarray  # float32, shape (dimension,)


@dataclass(frozen=True)
class WebImage:
    image_id: str
    feature: np.ndarray  # float32, shape (dimension,)
    rho: float | None = None  # adaptive weight, absent until the solver fills it


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    title: str
    description: str
    upload_time: int
    frames: tuple[CandidateKeyframe, ...]


@dataclass(frozen=True)
class GroundTruth:
    """Per-annotator keyframe selections, keyed by annotator id."""

    annotators: dict[str, frozenset[str]]


@dataclass(frozen=True)
class QueryCorpus:
    query: str
    dimension: int
    videos: tuple[VideoRecord, ...]
    web_images: tuple[WebImage, ...]
    word_vectors: dict[str, np.ndarray] | None = None

    @property
    def num_frames(self) -> int:
        return sum(len(v.frames) for v in self.videos)

    @property
    def num_web_images(self) -> int:
        return len(self.web_images)

    def all_frames(self) -> tuple[CandidateKeyframe, ...]:
        """Every candidate keyframe, in video order then play order."""
        return tuple(f for v in self.videos for f in v.frames)

    def frame_ids(self) -> list[str]:
        return [f.frame_id for f in self.all_frames()]

    def frame_index(self) -> dict[str, CandidateKeyframe]:
        return {f.frame_id: f for f in self.all_frames()}

    def video_index(self) -> dict[str, VideoRecord]:
        return {v.video_id: v for v in self.videos}

    def frame_matrix(self) -> np.ndarray:
        """Feature matrix with one float64 column per candidate keyframe."""
        frames = self.all_frames()
        out = np.empty((self.dimension, len(frames)), dtype=np.float64)
        for j, frame in enumerate(frames):
            out[:, j] = frame.feature
        return out

    def web_matrix(self) -> np.ndarray:
        """Feature matrix with one float64 column per web image."""
        out = np.empty((self.dimension, len(self.web_images)), dtype=np.float64)
        for j, image in enumerate(self.web_images):
            out[:, j] = image.feature
        return out


def read_feature_blob(path: Path | str) -> np.ndarray:
    """Read a QFV1 blob into a float32 array of shape (rows, dimension)."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read feature blob {path}: {exc}") from exc
    head = len(QFV1_MAGIC) + _QFV1_HEADER.size
    if len(raw) < head:
        raise CorpusError(f"feature blob {path} is truncated (no header)")
    if raw[: len(QFV1_MAGIC)] != QFV1_MAGIC:
        raise CorpusError(f"feature blob {path} has bad magic {raw[:4]!r}")
    rows, dim = _QFV1_HEADER.unpack_from(raw, len(QFV1_MAGIC))
    expected = head + rows * dim * 4
    if len(raw) != expected:
        raise CorpusError(
            f"feature blob {path} declares {rows}x{dim} but holds "
            f"{len(raw) - head} payload bytes (expected {expected - head})"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=head)
    return data.reshape(rows, dim).copy()


def write_feature_blob(path: Path | str, rows: np.ndarray) -> None:
    """Write a (rows, dimension) array as a QFV1 blob, cast to float32."""
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"feature blob payload must be 2-D, got shape {arr.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(QFV1_MAGIC)
        fh.write(_QFV1_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes())


def load_word_vectors(path: Path | str) -> dict[str, np.ndarray]:
    """Parse ``token v1 ... v_dw`` lines into a token -> float64 vector map."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read word vectors {path}: {exc}") from exc
    vectors: dict[str, np.ndarray] = {}
    width: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) < 2:
            raise CorpusError(f"{path}:{lineno}: word-vector line has no values")
        token = parts[0]
        if token in vectors:
            raise CorpusError(f"{path}:{lineno}: duplicate word vector for {token!r}")
        try:
            vec = np.array([float(p) for p in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: bad word-vector value: {exc}") from exc
        if width is None:
            width = vec.size
        elif vec.size != width:
            raise CorpusError(
                f"{path}:{lineno}: word vector for {token!r} has {vec.size} "
                f"values, expected {width}"
            )
        if not np.all(np.isfinite(vec)):
            raise CorpusError(f"{path}:{lineno}: non-finite word vector for {token!r}")
        vectors[token] = vec
    if not vectors:
        raise CorpusError(f"word-vector file {path} holds no vectors")
    return vectors


def _check_finite(feature: np.ndarray, entity: str) -> None:
    if not np.all(np.isfinite(feature)):
        raise CorpusError(f"non-finite feature values in {entity}")


def _normalized(feature: np.ndarray, entity: str) -> np.ndarray:
    norm = float(np.linalg.norm(feature.astype(np.float64)))
    if norm == 0.0:
        warnings.warn(f"zero-norm feature for {entity} left unnormalized", DataWarning)
        return feature
    return (feature.astype(np.float64) / norm).astype(np.float32)


def load_corpus(manifest_path: Path | str, normalize_features: bool = False) -> QueryCorpus:
    """Load a corpus from its manifest, validating ids, dimensions, and blobs.

    With ``normalize_features`` every frame and web-image feature is
    L2-normalized at load time; zero-norm vectors are kept as-is with a
    warning.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise CorpusError(f"manifest {manifest_path} must be a JSON object")

    base = manifest_path.parent
    query = manifest.get("query")
    if not isinstance(query, str) or not query:
        raise CorpusError(f"manifest {manifest_path} needs a non-empty 'query'")
    dimension = manifest.get("dimension")
    if not isinstance(dimension, int) or dimension < 1:
        raise CorpusError(f"manifest {manifest_path} needs a positive integer 'dimension'")

    raw_videos = manifest.get("videos")
    if not isinstance(raw_videos, list) or not raw_videos:
        raise CorpusError(f"manifest {manifest_path} needs a non-empty 'videos' list")

    videos: list[VideoRecord] = []
    seen_videos: set[str] = set()
    seen_frames: set[str] = set()
    for entry in raw_videos:
        if not isinstance(entry, dict):
            raise CorpusError(f"manifest {manifest_path}: video entries must be objects")
        video_id = entry.get("video_id")
        if not isinstance(video_id, str) or not video_id:
            raise CorpusError(f"manifest {manifest_path}: video without a 'video_id'")
        if video_id in seen_videos:
            raise CorpusError(f"duplicate video id {video_id!r}")
        seen_videos.add(video_id)

        raw_frames = entry.get("frames")
        if not isinstance(raw_frames, list) or not raw_frames:
            raise CorpusError(f"video {video_id!r} lists no frames")
        blob_rel = entry.get("features")
        if not isinstance(blob_rel, str):
            raise CorpusError(f"video {video_id!r} lists no 'features' blob path")
        blob = read_feature_blob(base / blob_rel)
        if blob.shape[0] != len(raw_frames):
            raise CorpusError(
                f"video {video_id!r}: blob holds {blob.shape[0]} rows for "
                f"{len(raw_frames)} frames"
            )
        if blob.shape[1] != dimension:
            raise CorpusError(
                f"video {video_id!r}: blob dimension {blob.shape[1]} != corpus "
                f"dimension {dimension}"
            )

        frames: list[CandidateKeyframe] = []
        for order, raw_frame in enumerate(raw_frames):
            if isinstance(raw_frame, str):
                frame_id, shot_index = raw_frame, order
            elif isinstance(raw_frame, dict):
                frame_id = raw_frame.get("frame_id")
                shot_index = raw_frame.get("shot_index", order)
                if not isinstance(frame_id, str) or not isinstance(shot_index, int):
                    raise CorpusError(f"video {video_id!r}: malformed frame entry {raw_frame!r}")
            else:
                raise CorpusError(f"video {video_id!r}: malformed frame entry {raw_frame!r}")
            if frame_id in seen_frames:
                raise CorpusError(f"duplicate frame id {frame_id!r}")
            seen_frames.add(frame_id)
            feature = blob[order]
            _check_finite(feature, f"frame {frame_id!r}")
            if normalize_features:
                feature = _normalized(feature, f"frame {frame_id!r}")
            frames.append(
                CandidateKeyframe(
                    frame_id=frame_id,
                    video_id=video_id,
                    shot_index=shot_index,
                    play_order=order,
                    feature=feature,
                )
            )

        videos.append(
            VideoRecord(
                video_id=video_id,
                title=str(entry.get("title", "")),
                description=str(entry.get("description", "")),
                upload_time=int(entry.get("upload_time", 0)),
                frames=tuple(frames),
            )
        )

    web_images: list[WebImage] = []
    raw_web = manifest.get("web_images")
    if raw_web:
        if not isinstance(raw_web, dict):
            raise CorpusError(f"manifest {manifest_path}: 'web_images' must be an object")
        ids = raw_web.get("ids")
        blob_rel = raw_web.get("features")
        if not isinstance(ids, list) or not isinstance(blob_rel, str):
            raise CorpusError(f"manifest {manifest_path}: 'web_images' needs 'ids' and 'features'")
        blob = read_feature_blob(base / blob_rel)
        if blob.shape[0] != len(ids):
            raise CorpusError(
                f"web images: blob holds {blob.shape[0]} rows for {len(ids)} ids"
            )
        if len(ids) and blob.shape[1] != dimension:
            raise CorpusError(
                f"web images: blob dimension {blob.shape[1]} != corpus dimension {dimension}"
            )
        seen_images: set[str] = set()
        for order, image_id in enumerate(ids):
            if not isinstance(image_id, str) or not image_id:
                raise CorpusError(f"web images: malformed image id {image_id!r}")
            if image_id in seen_images:
                raise CorpusError(f"duplicate web image id {image_id!r}")
            seen_images.add(image_id)
            feature = blob[order]
            _check_finite(feature, f"web image {image_id!r}")
            if normalize_features:
                feature = _normalized(feature, f"web image {image_id!r}")
            web_images.append(WebImage(image_id=image_id, feature=feature))

    word_vectors = None
    if manifest.get("word_vectors"):
        word_vectors = load_word_vectors(base / manifest["word_vectors"])

    return QueryCorpus(
        query=query,
        dimension=dimension,
        videos=tuple(videos),
        web_images=tuple(web_images),
        word_vectors=word_vectors,
    )


def write_corpus(corpus: QueryCorpus, out_dir: Path | str, manifest_name: str = "manifest.json") -> Path:
    """Write a corpus back to disk; returns the manifest path.

    Feature values are stored as float32 exactly as held in memory, so
    ``load_corpus(write_corpus(c))`` reproduces every feature bit for bit.
    """
    out_dir = Path(out_dir)
    blob_dir = out_dir / "features"
    blob_dir.mkdir(parents=True, exist_ok=True)

    manifest: dict = {"query": corpus.query, "dimension": corpus.dimension, "videos": []}
    for video in corpus.videos:
        rel = f"features/{video.video_id}.qfv"
        write_feature_blob(out_dir / rel, np.stack([f.feature for f in video.frames]))
        manifest["videos"].append(
            {
                "video_id": video.video_id,
                "title": video.title,
                "description": video.description,
                "upload_time": video.upload_time,
                "frames": [
                    {"frame_id": f.frame_id, "shot_index": f.shot_index} for f in video.frames
                ],
                "features": rel,
            }
        )
    if corpus.web_images:
        rel = "features/web_images.qfv"
        write_feature_blob(out_dir / rel, np.stack([im.feature for im in corpus.web_images]))
        manifest["web_images"] = {
            "ids": [im.image_id for im in corpus.web_images],
            "features": rel,
        }
    if corpus.word_vectors:
        lines = []
        for token in sorted(corpus.word_vectors):
            values = " ".join(repr(float(v)) for v in corpus.word_vectors[token])
            lines.append(f"{token} {values}")
        (out_dir / "word_vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        manifest["word_vectors"] = "word_vectors.txt"

    manifest_path = out_dir / manifest_name
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def load_ground_truth(path: Path | str, corpus: QueryCorpus | None) -> GroundTruth:
    """Load annotator selections, checking frame ids against the corpus.

    Pass ``corpus=None`` to skip the frame-existence check, e.g. when only
    inter-annotator consistency is needed.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"cannot read ground truth {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusError(f"ground truth {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not raw:
        raise CorpusError(f"ground truth {path} must map annotator ids to frame lists")

    known = set(corpus.frame_ids()) if corpus is not None else None
    annotators: dict[str, frozenset[str]] = {}
    for annotator_id, selection in raw.items():
        if not isinstance(selection, list):
            raise CorpusError(f"annotator {annotator_id!r}: selection must be a list")
        if not selection:
            raise CorpusError(f"annotator {annotator_id!r} selected no frames")
        for frame_id in selection:
            if not isinstance(frame_id, str):
                raise CorpusError(
                    f"annotator {annotator_id!r}: frame ids must be strings, got {frame_id!r}"
                )
            if known is not None and frame_id not in known:
                raise CorpusError(
                    f"annotator {annotator_id!r} references unknown frame {frame_id!r}"
                )
        annotators[annotator_id] = frozenset(selection)
    return GroundTruth(annotators=annotators)


def attach_weights(corpus: QueryCorpus, weights: dict[str, float]) -> QueryCorpus:
    """Return a copy of the corpus with adaptive weights filled into the images."""
    images = tuple(
        replace(image, rho=float(weights[image.image_id])) for image in corpus.web_images
    )
    return replace(corpus, web_images=images)
