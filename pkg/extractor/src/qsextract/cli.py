"""Command-line entry point: raw videos and images in, corpus out.

    querysum-extract --videos DIR --out DIR [--images DIR] [--tags FILE]
                     [--word-vectors FILE] [--query STR] [options]

Exit codes: 0 success, 1 usage error, 2 unreadable or inconsistent input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import cv2
import numpy as np

from . import __version__
from .config import ExtractError, ExtractorConfig
from .corpusio import VideoExtraction, write_corpus
from .features import extract_frame_features, frame_feature, load_backbone
from .shots import detect_shots

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

VIDEO_SUFFIXES = {".avi", ".mp4", ".mkv", ".mov", ".webm", ".mpg", ".mpeg", ".m4v"}
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp"}

DEFAULT_QUERY = "untitled query"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1 instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="querysum-extract",
        description="Extract a summarization corpus from videos and web images.",
    )
    parser.add_argument("--version", action="version", version=f"querysum-extract {__version__}")
    parser.add_argument("--videos", required=True, help="directory of input videos")
    parser.add_argument("--out", required=True, help="output corpus directory")
    parser.add_argument("--images", help="directory of query web images")
    parser.add_argument("--tags", help="JSON file with the query and per-video tag text")
    parser.add_argument("--word-vectors", help="word embedding text file to copy into the corpus")
    parser.add_argument("--query", help="query string (overrides the tags file)")
    parser.add_argument(
        "--shot-threshold",
        type=float,
        default=ExtractorConfig.shot_diff_threshold,
        help="L1 histogram distance above which a shot boundary is declared",
    )
    parser.add_argument(
        "--fps-sample",
        type=float,
        default=ExtractorConfig.fps_sample,
        help="frames per second to sample for shot detection (<= 0: every frame)",
    )
    parser.add_argument(
        "--model",
        default=ExtractorConfig.cnn_model_id,
        help="CNN backbone id (default: %(default)s)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="videos to extract in parallel (default: %(default)s)",
    )
    return parser


def load_tags(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        tags = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ExtractError(f"cannot read tags file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ExtractError(f"tags file {path} is not valid JSON: {exc}") from exc
    if not isinstance(tags, dict):
        raise ExtractError(f"tags file {path} must be a JSON object")
    return tags


def _discover(directory: str, suffixes: set[str], kind: str) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ExtractError(f"{kind} directory {directory} does not exist")
    found = sorted(p for p in root.iterdir() if p.suffix.lower() in suffixes)
    if not found:
        raise ExtractError(f"no {kind} files found in {directory}")
    return found


def extract_video(path: Path, tags: dict, config: ExtractorConfig) -> VideoExtraction:
    video_id = path.stem
    shots = detect_shots(path, config)
    features, keyframes = extract_frame_features(path, shots, config)
    entry = tags.get("videos", {}).get(video_id, {})
    return VideoExtraction(
        video_id=video_id,
        title=str(entry.get("title", "")),
        description=str(entry.get("description", "")),
        upload_time=int(entry.get("upload_time", 0)),
        shots=tuple(shots),
        frame_ids=tuple(f"{video_id}_s{index}" for index in range(len(shots))),
        features=features,
        thumbnails=tuple(keyframes),
    )


def extract_images(directory: str, config: ExtractorConfig) -> tuple[list[str], np.ndarray]:
    model, _ = load_backbone(config.cnn_model_id)
    ids: list[str] = []
    rows: list[np.ndarray] = []
    for path in _discover(directory, IMAGE_SUFFIXES, "image"):
        image = cv2.imread(str(path))
        if image is None:
            raise ExtractError(f"cannot decode image {path}")
        ids.append(path.stem)
        rows.append(frame_feature(image, model, config))
    return ids, np.stack(rows)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ExtractorConfig(
            cnn_model_id=args.model,
            shot_diff_threshold=args.shot_threshold,
            fps_sample=args.fps_sample,
        )
        tags = load_tags(args.tags)
        query = args.query or tags.get("query") or DEFAULT_QUERY

        video_paths = _discover(args.videos, VIDEO_SUFFIXES, "video")
        # Load the backbone once up front so worker threads share it instead
        # of racing to initialize it.
        _, weights_tag = load_backbone(config.cnn_model_id)

        if args.workers > 1:
            with ThreadPoolExecutor(max_workers=args.workers) as pool:
                extractions = list(
                    pool.map(lambda p: extract_video(p, tags, config), video_paths)
                )
        else:
            extractions = [extract_video(p, tags, config) for p in video_paths]

        web_ids: list[str] | None = None
        web_features: np.ndarray | None = None
        if args.images:
            web_ids, web_features = extract_images(args.images, config)

        manifest_path = write_corpus(
            args.out,
            query,
            extractions,
            config,
            weights_tag,
            web_image_ids=web_ids,
            web_image_features=web_features,
            word_vectors_path=args.word_vectors,
        )
    except (ExtractError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    total_frames = sum(len(e.frame_ids) for e in extractions)
    print(
        f"wrote {manifest_path}: {len(extractions)} videos, "
        f"{total_frames} keyframes"
        + (f", {len(web_ids)} web images" if web_ids else "")
    )
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
