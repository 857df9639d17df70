"""Corpus output: feature blobs, manifest, thumbnails, and run metadata.

The output directory is a self-contained corpus the summarizer consumes:

* ``features/<video_id>.qfv`` — one QFV1 blob per video (magic ``QFV1``,
  two little-endian uint32 header words for row count and dimension, then
  row-major little-endian float32 data);
* ``features/web_images.qfv`` — optional blob for web-image features;
* ``thumbnails/<frame_id>.jpg`` — one JPEG per emitted keyframe;
* ``manifest.json`` — ties ids, tag text, and blob paths together;
* ``extractor_metadata.json`` — how the corpus was produced.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from . import __version__
from .config import ExtractError, ExtractorConfig

QFV1_MAGIC = b"QFV1"
_QFV1_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class VideoExtraction:
    """Everything extracted from one video, ready to serialize."""

    video_id: str
    title: str
    description: str
    upload_time: int
    shots: tuple[tuple[int, int], ...]
    frame_ids: tuple[str, ...]
    features: np.ndarray  # (num_shots, dimension) float32
    thumbnails: tuple[np.ndarray, ...]  # BGR uint8 keyframe images


def write_feature_blob(path: Path | str, rows: np.ndarray) -> None:
    """Write a (rows, dimension) float32 array as a QFV1 blob."""
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise ExtractError(f"feature blob payload must be 2-D, got shape {arr.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(QFV1_MAGIC)
        fh.write(_QFV1_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes())


def write_thumbnails(out_dir: Path, extraction: VideoExtraction) -> None:
    thumb_dir = out_dir / "thumbnails"
    thumb_dir.mkdir(parents=True, exist_ok=True)
    for frame_id, image in zip(extraction.frame_ids, extraction.thumbnails):
        target = thumb_dir / f"{frame_id}.jpg"
        if not cv2.imwrite(str(target), image):
            raise ExtractError(f"cannot write thumbnail {target}")


def write_corpus(
    out_dir: Path | str,
    query: str,
    extractions: list[VideoExtraction],
    config: ExtractorConfig,
    weights_tag: str,
    web_image_ids: list[str] | None = None,
    web_image_features: np.ndarray | None = None,
    word_vectors_path: Path | str | None = None,
) -> Path:
    """Write the full corpus; returns the manifest path."""
    if not extractions:
        raise ExtractError("no videos were extracted; nothing to write")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    dimension = int(extractions[0].features.shape[1])
    manifest: dict = {"query": query, "dimension": dimension, "videos": []}

    for extraction in sorted(extractions, key=lambda e: e.video_id):
        if extraction.features.shape[1] != dimension:
            raise ExtractError(
                f"video {extraction.video_id!r} produced dimension "
                f"{extraction.features.shape[1]}, expected {dimension}"
            )
        rel = f"features/{extraction.video_id}.qfv"
        write_feature_blob(out_dir / rel, extraction.features)
        write_thumbnails(out_dir, extraction)
        manifest["videos"].append(
            {
                "video_id": extraction.video_id,
                "title": extraction.title,
                "description": extraction.description,
                "upload_time": extraction.upload_time,
                "frames": [
                    {"frame_id": frame_id, "shot_index": index}
                    for index, frame_id in enumerate(extraction.frame_ids)
                ],
                "features": rel,
            }
        )

    if web_image_ids:
        if web_image_features is None or web_image_features.shape[0] != len(
            web_image_ids
        ):
            raise ExtractError("web image ids and features disagree")
        rel = "features/web_images.qfv"
        write_feature_blob(out_dir / rel, web_image_features)
        manifest["web_images"] = {"ids": web_image_ids, "features": rel}

    if word_vectors_path is not None:
        # Pass the embedding file through verbatim; its format is already
        # the one the summarizer reads.
        source = Path(word_vectors_path)
        try:
            payload = source.read_bytes()
        except OSError as exc:
            raise ExtractError(f"cannot read word vectors {source}: {exc}") from exc
        (out_dir / "word_vectors.txt").write_bytes(payload)
        manifest["word_vectors"] = "word_vectors.txt"

    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    metadata = {
        "extractor_version": __version__,
        "cnn_model": config.cnn_model_id,
        "cnn_weights": weights_tag,
        "input_size": [224, 224],
        "resize": "bilinear",
        "hsv_bins": list(config.hsv_bins),
        "shot_diff_threshold": config.shot_diff_threshold,
        "fps_sample": config.fps_sample,
        "shots": {
            extraction.video_id: [list(span) for span in extraction.shots]
            for extraction in sorted(extractions, key=lambda e: e.video_id)
        },
    }
    (out_dir / "extractor_metadata.json").write_text(
        json.dumps(metadata, indent=2) + "\n", encoding="utf-8"
    )
    return manifest_path
