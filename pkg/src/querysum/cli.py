"""Command-line pipeline: summarize, events, eval, consistency.

Every command writes JSON files that embed the package version and the full
flag configuration, and the outputs are byte-deterministic: the same flags
over the same input files always produce identical bytes.

Exit codes: 0 success, 1 usage error, 2 data or file error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import CorpusError, QueryCorpus, load_corpus, load_ground_truth
from .evaluation import MatchConfig, consistency, prf
from .events import (
    FusionConfig,
    assemble_ekp,
    fuse_graphs,
    graph_cut,
    label_events,
)
from .render import RenderConfig, emit_html, emit_json, summary_to_dict
from .solver import (
    SolverConfig,
    SolverError,
    Summary,
    adaptive_weights,
    select_keyframes,
    solve,
)
from .textgraph import (
    DEFAULT_STOPWORDS,
    WordClustering,
    cluster_words,
    default_k_words,
    load_stopwords,
    textual_graph,
    tfidf,
    tokenize,
)
from .visgraph import NearDuplicateConfig, visual_graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1 instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_events_arg(value: str):
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="querysum", description=__doc__)
    parser.add_argument("--version", action="version", version=f"querysum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("summarize", help="score frames and select keyframes")
    ps.add_argument("manifest", help="corpus manifest JSON")
    ps.add_argument("-o", "--out-dir", default=".", help="output directory")
    ps.add_argument("--gamma", type=float, default=0.005, help="L1 sparsity weight")
    ps.add_argument("--tc", type=float, default=0.01, help="keyframe score threshold")
    ps.add_argument("--max-iters", type=int, default=10_000, help="sweep budget")
    ps.add_argument("--tolerance", type=float, default=1e-8, help="convergence tolerance")
    ps.add_argument(
        "--normalize-features",
        action="store_true",
        help="L2-normalize features at load time",
    )
    ps.set_defaults(func=cmd_summarize)

    pe = sub.add_parser("events", help="group keyframes into labeled events")
    pe.add_argument("manifest", help="corpus manifest JSON")
    pe.add_argument("summary", help="summary.json from the summarize command")
    pe.add_argument("-o", "--out-dir", default=".", help="output directory")
    pe.add_argument("--alpha", type=float, default=0.7, help="visual weight in graph fusion")
    pe.add_argument("--tau-nd", type=float, default=0.9, help="near-duplicate cosine threshold")
    pe.add_argument(
        "--k-events", type=_k_events_arg, default="auto", help="event count or 'auto'"
    )
    pe.add_argument("--k-words", type=int, default=None, help="word cluster count")
    pe.add_argument("--seed", type=int, default=0, help="clustering seed")
    pe.add_argument("--stopwords", default=None, help="stopword file, one token per line")
    pe.add_argument("--thumbnails", default=None, help="directory of <frame_id>.jpg thumbnails")
    pe.add_argument(
        "--include-scores", action="store_true", help="show scores in the HTML page"
    )
    pe.set_defaults(func=cmd_events)

    pv = sub.add_parser("eval", help="score a summary against ground truth")
    pv.add_argument("manifest", help="corpus manifest JSON")
    pv.add_argument("summary", help="summary.json from the summarize command")
    pv.add_argument("truth", help="ground-truth JSON")
    pv.add_argument("-o", "--out-dir", default=".", help="output directory")
    pv.add_argument("--threshold", type=float, default=0.6, help="match distance threshold")
    pv.add_argument(
        "--direction",
        choices=("generated", "truth"),
        default="generated",
        help="which side drives the greedy matching",
    )
    pv.set_defaults(func=cmd_eval)

    pc = sub.add_parser("consistency", help="inter-annotator agreement of ground truth")
    pc.add_argument("truth", help="ground-truth JSON")
    pc.add_argument("-o", "--out-dir", default=".", help="output directory")
    pc.set_defaults(func=cmd_consistency)
    return parser


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _meta(command: str, config: dict) -> dict:
    return {"version": __version__, "command": command, "config": config}


def _read_summary(path: Path | str, corpus: QueryCorpus) -> Summary:
    """Load summary.json and check it belongs to the given corpus."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"cannot read summary {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusError(f"summary {path} is not valid JSON: {exc}") from exc
    if payload.get("query") != corpus.query:
        raise CorpusError(
            f"summary query {payload.get('query')!r} does not match corpus query "
            f"{corpus.query!r}"
        )
    known = set(corpus.frame_ids())
    keyframes = []
    for entry in payload.get("keyframes", []):
        frame_id = entry["frame_id"]
        if frame_id not in known:
            raise CorpusError(f"summary references unknown frame {frame_id!r}")
        keyframes.append((frame_id, float(entry["score"])))
    return Summary(keyframes=tuple(keyframes), threshold_used=float(payload["threshold_used"]))


def cmd_summarize(args: argparse.Namespace) -> int:
    config = {
        "manifest": args.manifest,
        "out_dir": args.out_dir,
        "gamma": args.gamma,
        "tc": args.tc,
        "max_iters": args.max_iters,
        "tolerance": args.tolerance,
        "normalize_features": args.normalize_features,
    }
    corpus = load_corpus(args.manifest, normalize_features=args.normalize_features)
    solver_config = SolverConfig(
        gamma=args.gamma, tc=args.tc, max_iters=args.max_iters, tolerance=args.tolerance
    )
    weights = adaptive_weights(corpus)
    scores = solve(corpus, weights, solver_config)
    if not scores.converged:
        print(
            f"warning: solver stopped after {scores.iterations_used} sweeps "
            "without meeting the convergence certificate",
            file=sys.stderr,
        )
    summary = select_keyframes(scores, solver_config.tc)

    meta = _meta("summarize", config)
    out_dir = Path(args.out_dir)
    _write_json(
        out_dir / "scores.json",
        {
            "query": corpus.query,
            "scores": {fid: scores.scores[fid] for fid in corpus.frame_ids()},
            "objective_value": scores.objective_value,
            "iterations_used": scores.iterations_used,
            "converged": scores.converged,
            "web_image_weights": {im.image_id: weights[im.image_id] for im in corpus.web_images},
            "meta": meta,
        },
    )
    frame_index = corpus.frame_index()
    _write_json(
        out_dir / "summary.json",
        {
            "query": corpus.query,
            "threshold_used": summary.threshold_used,
            "keyframes": [
                {"frame_id": fid, "video_id": frame_index[fid].video_id, "score": score}
                for fid, score in summary.keyframes
            ],
            "meta": meta,
        },
    )
    return EXIT_OK


def _word_clustering(corpus: QueryCorpus, vocab: list[str], k_words: int | None, seed: int):
    """Pick the word clustering: seeded k-means over embeddings when the
    corpus has them, otherwise one cluster per word."""
    if not vocab:
        return WordClustering(assignment={}, k_words=0, centroids=None)
    vectors = corpus.word_vectors or {}
    backed = [word for word in vocab if word in vectors]
    if not backed:
        return WordClustering.identity(vocab)
    if k_words is None:
        k = min(default_k_words(len(vocab)), len(backed))
        k = max(k, 1)
    else:
        k = k_words  # validated by cluster_words against the backed vocabulary
    return cluster_words(vocab, vectors, k, seed)


def cmd_events(args: argparse.Namespace) -> int:
    config = {
        "manifest": args.manifest,
        "summary": args.summary,
        "out_dir": args.out_dir,
        "alpha": args.alpha,
        "tau_nd": args.tau_nd,
        "k_events": args.k_events,
        "k_words": args.k_words,
        "seed": args.seed,
        "stopwords": args.stopwords,
        "thumbnails": args.thumbnails,
        "include_scores": args.include_scores,
    }
    fusion = FusionConfig(alpha=args.alpha, k_events=args.k_events)
    near_dup = NearDuplicateConfig(tau_nd=args.tau_nd)
    corpus = load_corpus(args.manifest)
    summary = _read_summary(args.summary, corpus)
    stopwords = load_stopwords(args.stopwords) if args.stopwords else DEFAULT_STOPWORDS

    docs = tokenize(corpus, stopwords=stopwords)
    vocab = sorted({token for doc in docs for token in doc.tokens})
    clustering = _word_clustering(corpus, vocab, args.k_words, args.seed)
    vectors = tfidf(docs, clustering)

    textual = textual_graph(vectors)
    visual = visual_graph(corpus, near_dup)
    fused = fuse_graphs(visual, textual, fusion.alpha)
    partition = graph_cut(fused, fusion.k_events, args.seed)
    labels = label_events(partition, vectors, clustering, docs)
    ekp = assemble_ekp(summary, partition, labels, corpus)

    kept = {group.event_id for group in ekp.events}
    meta = _meta("events", config)
    meta["partition"] = {vid: partition[vid] for vid in sorted(partition)}
    meta["event_labels"] = {str(event): labels[event] for event in sorted(labels)}
    meta["events_without_keyframes"] = sorted(set(partition.values()) - kept)

    out_dir = Path(args.out_dir)
    emit_json(ekp, out_dir / "ekp.json", meta=meta)
    render = RenderConfig(
        output_dir=out_dir,
        thumbnail_dir=Path(args.thumbnails) if args.thumbnails else None,
        include_scores=args.include_scores,
    )
    emit_html(ekp, render)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = {
        "manifest": args.manifest,
        "summary": args.summary,
        "truth": args.truth,
        "out_dir": args.out_dir,
        "threshold": args.threshold,
        "direction": args.direction,
    }
    match_config = MatchConfig(distance_threshold=args.threshold, direction=args.direction)
    corpus = load_corpus(args.manifest)
    summary = _read_summary(args.summary, corpus)
    truth = load_ground_truth(args.truth, corpus)
    report = prf(summary, truth, corpus, match_config)

    _write_json(
        Path(args.out_dir) / "metrics.json",
        {
            "per_annotator": {
                aid: {
                    "n_matched": score.n_matched,
                    "n_generated": score.n_generated,
                    "n_truth": score.n_truth,
                    "precision": score.precision,
                    "recall": score.recall,
                    "f_score": score.f_score,
                }
                for aid, score in sorted(report.per_annotator.items())
            },
            "average": {
                "precision": report.average[0],
                "recall": report.average[1],
                "f_score": report.average[2],
            },
            "degenerate": report.degenerate,
            "meta": _meta("eval", config),
        },
    )
    return EXIT_OK


def cmd_consistency(args: argparse.Namespace) -> int:
    config = {"truth": args.truth, "out_dir": args.out_dir}
    truth = load_ground_truth(args.truth, corpus=None)
    report = consistency(truth)
    _write_json(
        Path(args.out_dir) / "consistency.json",
        {
            "per_annotator": {aid: report.per_annotator[aid] for aid in sorted(report.per_annotator)},
            "min": report.minimum,
            "max": report.maximum,
            "mean": report.mean,
            "meta": _meta("consistency", config),
        },
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CorpusError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
