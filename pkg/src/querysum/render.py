"""Render an event summary as JSON and as a static HTML storyboard.

Output is deterministic: no timestamps, stable key order, stable float
formatting. The HTML page embeds thumbnails as data URIs when a thumbnail
directory is supplied, so the page works as a single self-contained file;
frames without a thumbnail render as a named placeholder tile.
"""

from __future__ import annotations

import base64
import html
import json
from dataclasses import dataclass
from pathlib import Path

from .events import EventGroup, EventSummary, KeyframeRef

_THUMBNAIL_TYPES = ((".jpg", "image/jpeg"), (".jpeg", "image/jpeg"), (".png", "image/png"))

_PAGE_STYLE = """
body { font-family: sans-serif; margin: 2rem; background: #fafafa; color: #222; }
h1 { font-size: 1.6rem; }
section.event { margin: 1.5rem 0; padding: 1rem; background: #fff;
                border: 1px solid #ddd; border-radius: 6px; }
.event-rank { color: #888; font-size: 0.8rem; text-transform: uppercase; }
h2 { margin: 0.2rem 0 0.8rem; font-size: 1.2rem; }
.tiles { display: flex; flex-wrap: wrap; gap: 0.8rem; }
figure { margin: 0; width: 180px; }
figure img, .placeholder { width: 180px; height: 120px; object-fit: cover;
                           border-radius: 4px; }
.placeholder { display: flex; align-items: center; justify-content: center;
               background: #e8e8ee; color: #555; font-size: 0.75rem;
               word-break: break-all; }
figcaption { font-size: 0.75rem; color: #555; margin-top: 0.3rem; }
""".strip()


@dataclass(frozen=True)
class RenderConfig:
    output_dir: Path
    thumbnail_dir: Path | None = None
    include_scores: bool = False


def summary_to_dict(summary: EventSummary) -> dict:
    """JSON-ready view: query plus ordered events and their keyframes."""
    return {
        "query": summary.query,
        "events": [
            {
                "event_id": group.event_id,
                "label_words": list(group.label_words),
                "keyframes": [
                    {"frame_id": ref.frame_id, "video_id": ref.video_id, "score": ref.score}
                    for ref in group.keyframes
                ],
            }
            for group in summary.events
        ],
    }


def emit_json(summary: EventSummary, path: Path | str, meta: dict | None = None) -> Path:
    """Write the event summary as deterministic, indented JSON."""
    payload = summary_to_dict(summary)
    if meta is not None:
        payload["meta"] = meta
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def parse_event_summary(path: Path | str) -> EventSummary:
    """Rebuild an EventSummary from emit_json output.

    Member videos that contributed no keyframe are not serialized, so the
    parsed groups carry exactly the keyframes' video ids.
    """
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    groups = []
    for raw in payload["events"]:
        refs = tuple(
            KeyframeRef(frame_id=k["frame_id"], video_id=k["video_id"], score=k["score"])
            for k in raw["keyframes"]
        )
        groups.append(
            EventGroup(
                event_id=raw["event_id"],
                label_words=tuple(raw["label_words"]),
                video_ids=frozenset(ref.video_id for ref in refs),
                keyframes=refs,
            )
        )
    return EventSummary(query=payload["query"], events=tuple(groups))


def _thumbnail_uri(thumbnail_dir: Path | None, frame_id: str) -> str | None:
    if thumbnail_dir is None:
        return None
    for suffix, mime in _THUMBNAIL_TYPES:
        candidate = thumbnail_dir / f"{frame_id}{suffix}"
        if candidate.is_file():
            encoded = base64.b64encode(candidate.read_bytes()).decode("ascii")
            return f"data:{mime};base64,{encoded}"
    return None


def _tile(ref: KeyframeRef, config: RenderConfig) -> str:
    uri = _thumbnail_uri(config.thumbnail_dir, ref.frame_id)
    name = html.escape(ref.frame_id)
    if uri is None:
        image = f'<div class="placeholder">{name}</div>'
    else:
        image = f'<img src="{uri}" alt="{name}">'
    caption = name
    if config.include_scores:
        caption += f" ({ref.score:.3f})"
    return f"<figure>{image}<figcaption>{caption}</figcaption></figure>"


def emit_html(summary: EventSummary, config: RenderConfig) -> Path:
    """Write the two-layer storyboard page; returns the page path."""
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{html.escape(summary.query)}</title>",
        f"<style>{_PAGE_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>{html.escape(summary.query)}</h1>",
    ]
    for rank, group in enumerate(summary.events, start=1):
        heading = html.escape(" ".join(group.label_words))
        parts.append('<section class="event">')
        parts.append(f'<div class="event-rank">Event {rank}</div>')
        parts.append(f"<h2>{heading}</h2>")
        parts.append('<div class="tiles">')
        for ref in group.keyframes:
            parts.append(_tile(ref, config))
        parts.append("</div>")
        parts.append("</section>")
    parts.append("</body>")
    parts.append("</html>")

    config.output_dir.mkdir(parents=True, exist_ok=True)
    page = config.output_dir / "ekp.html"
    page.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return page
