"""Release acceptance suite: one test per criterion, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` for the per-criterion verdicts;
add ``-s`` to see the detail lines inline.
"""

import itertools
import json
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from helpers import build_corpus, corpus_from_matrices, planted_corpus, planted_topic
from oracles import (
    brute_objective,
    mean_cosine_weights,
    projected_gradient_solve,
    random_instance,
    smooth_gradient,
)
from querysum.cli import EXIT_OK, main
from querysum.corpus import DataWarning, GroundTruth, write_corpus
from querysum.evaluation import MatchConfig, consistency, prf
from querysum.events import fuse_graphs, graph_cut
from querysum.solver import (
    SolverConfig,
    Summary,
    adaptive_weights,
    select_keyframes,
    solve,
)
from querysum.textgraph import WordClustering, textual_graph, tfidf, tokenize
from querysum.visgraph import NearDuplicateConfig, visual_graph

INSTANCE_SEED = 20240811
NUM_INSTANCES = 200
# The default sweep budget covers realistic corpora; adversarial random
# instances with near-parallel columns need far more sweeps to certify.
ACCEPTANCE_SOLVER = SolverConfig(max_iters=400_000)


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def solved_instances():
    """Solve the 200 shared random instances once; both solver criteria use them."""
    rng = np.random.default_rng(INSTANCE_SEED)
    records = []
    start = time.monotonic()
    for _ in range(NUM_INSTANCES):
        X, Z = random_instance(rng)
        corpus = corpus_from_matrices(X, Z if Z.size else None)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DataWarning)  # planted dead frames
            weights = adaptive_weights(corpus)
            result = solve(corpus, weights, ACCEPTANCE_SOLVER)
        rho = mean_cosine_weights(X, Z) if Z.size else np.zeros(0)
        a_cd = np.array([result.scores[fid] for fid in corpus.frame_ids()])
        a_pgd = projected_gradient_solve(X, Z if Z.size else None, rho, 0.005)
        records.append(
            {
                "X": X,
                "Z": Z if Z.size else None,
                "rho": rho,
                "converged": result.converged,
                "a_cd": a_cd,
                "f_cd": result.objective_value,
                "f_pgd": brute_objective(X, Z if Z.size else None, rho, a_pgd, 0.005),
            }
        )
    elapsed = time.monotonic() - start
    return records, elapsed


def test_solver_oracle_equivalence(solved_instances):
    records, elapsed = solved_instances
    unconverged = sum(not r["converged"] for r in records)
    worst_gap = max(abs(r["f_cd"] - r["f_pgd"]) for r in records)
    ok = unconverged == 0 and worst_gap <= 1e-6 and elapsed < 10.0
    _report(
        "solver matches projected-gradient oracle on "
        f"{NUM_INSTANCES} random instances",
        ok,
        f"max objective gap {worst_gap:.2e}, {unconverged} unconverged, "
        f"{elapsed:.2f}s",
    )


def test_solver_kkt_certificate(solved_instances):
    records, _ = solved_instances
    worst_active = 0.0
    worst_inactive = 0.0
    for r in records:
        gradient = smooth_gradient(r["X"], r["Z"], r["rho"], r["a_cd"]) + 0.005
        active = r["a_cd"] > 0
        if active.any():
            worst_active = max(worst_active, float(np.abs(gradient[active]).max()))
        if (~active).any():
            worst_inactive = max(worst_inactive, float(-gradient[~active].min()))
    ok = worst_active <= 1e-7 and worst_inactive <= 1e-7
    _report(
        "KKT certificate holds at every solution",
        ok,
        f"max active residual {worst_active:.2e}, "
        f"max inactive violation {worst_inactive:.2e}",
    )


def test_analytic_fixtures():
    orthonormal = solve(build_corpus({"v1": [[1, 0], [0, 1]]}), {}, SolverConfig())
    ortho_ok = abs(orthonormal.scores["v1_f0"] - 0.495) <= 1e-9 and abs(
        orthonormal.scores["v1_f1"] - 0.495
    ) <= 1e-9

    duplicated = solve(build_corpus({"v1": [[1, 0], [1, 0]]}), {}, SolverConfig())
    dup_summary = select_keyframes(duplicated, 0.01)
    dup_ok = len(dup_summary.keyframes) == 1

    boosted_corpus = build_corpus({"v1": [[1, 0], [0, 1]]}, web_images={"w1": [1, 0]})
    boosted = solve(boosted_corpus, adaptive_weights(boosted_corpus), SolverConfig())
    boost_ok = abs(boosted.scores["v1_f0"] - 0.6633) <= 1e-3 and abs(
        boosted.scores["v1_f1"] - 0.3300
    ) <= 1e-3

    _report(
        "analytic solver fixtures reproduce hand-derived solutions",
        ortho_ok and dup_ok and boost_ok,
        f"orthonormal {orthonormal.scores['v1_f0']:.9f}/"
        f"{orthonormal.scores['v1_f1']:.9f}, duplicated keeps "
        f"{len(dup_summary.keyframes)} keyframe, boosted "
        f"{boosted.scores['v1_f0']:.4f}/{boosted.scores['v1_f1']:.4f}",
    )


def test_l1_monotonicity_in_gamma():
    rng = np.random.default_rng(INSTANCE_SEED)
    X, Z = random_instance(rng)
    while X.shape[1] < 3 or not X.any():
        X, Z = random_instance(rng)
    corpus = corpus_from_matrices(X, Z if Z.size else None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DataWarning)
        weights = adaptive_weights(corpus)
        norms = []
        for gamma in (1e-4, 1e-3, 1e-2, 1e-1, 1.0):
            config = SolverConfig(gamma=gamma, max_iters=400_000)
            result = solve(corpus, weights, config)
            assert result.converged
            norms.append(sum(result.scores.values()))
        huge = solve(corpus, weights, SolverConfig(gamma=1e6, max_iters=400_000))
    empty = select_keyframes(huge, 0.01).keyframes == ()
    monotone = all(b <= a + 1e-10 for a, b in zip(norms, norms[1:]))
    _report(
        "L1 norm is non-increasing in gamma and a huge gamma empties the summary",
        monotone and empty,
        "norms " + " >= ".join(f"{v:.4f}" for v in norms) + f", empty at 1e6: {empty}",
    )


def _partition_accuracy(partition: dict[str, int]) -> float:
    video_ids = sorted(partition)
    truth = [planted_topic(vid) for vid in video_ids]
    got = [partition[vid] for vid in video_ids]
    events = sorted(set(got))
    best = 0
    for perm in itertools.permutations(range(3), len(events)):
        relabeled = [perm[events.index(e)] for e in got]
        best = max(best, sum(int(a == b) for a, b in zip(relabeled, truth)))
    return best / len(video_ids)


def test_planted_events_recovered():
    accuracies = []
    for seed in range(20):
        corpus = planted_corpus(per_topic=5, frames_per_video=3, seed=seed)
        docs = tokenize(corpus)
        vocab = sorted({token for doc in docs for token in doc.tokens})
        vectors = tfidf(docs, WordClustering.identity(vocab))
        fused = fuse_graphs(
            visual_graph(corpus, NearDuplicateConfig()),
            textual_graph(vectors),
            alpha=0.7,
        )
        partition = graph_cut(fused, k_events=3, seed=seed)
        accuracies.append(_partition_accuracy(partition))
    mean_accuracy = sum(accuracies) / len(accuracies)
    _report(
        "fused graph cut recovers 3 planted topics over 20 seeds",
        mean_accuracy >= 0.95,
        f"mean accuracy {mean_accuracy:.3f}, min {min(accuracies):.3f}",
    )


def test_metric_correctness():
    rng = np.random.default_rng(3)
    frames = [(f"f{i}", rng.uniform(0.0, 1.0, 12)) for i in range(8)]
    corpus = build_corpus({"v1": frames})
    picked = [f"f{i}" for i in sorted(rng.choice(8, size=4, replace=False))]
    summary = Summary(
        keyframes=tuple((fid, 1.0 - 0.01 * i) for i, fid in enumerate(picked)),
        threshold_used=0.01,
    )
    self_report = prf(
        summary,
        GroundTruth(annotators={"a1": frozenset(picked)}),
        corpus,
        MatchConfig(),
    )
    self_ok = self_report.average == (1.0, 1.0, 1.0)

    def basis(i):
        vec = [0.0] * 8
        vec[i] = 1.0
        return vec

    disjoint_corpus = build_corpus(
        {
            "vg": [(f"g{i}", basis(i)) for i in range(3)],
            "vt": [(f"t{i}", basis(i + 3)) for i in range(3)],
        }
    )
    disjoint_report = prf(
        Summary(
            keyframes=(("g0", 0.9), ("g1", 0.8), ("g2", 0.7)), threshold_used=0.01
        ),
        GroundTruth(annotators={"a1": frozenset({"t0", "t1", "t2"})}),
        disjoint_corpus,
        MatchConfig(),
    )
    disjoint_ok = disjoint_report.average == (0.0, 0.0, 0.0)

    hand_corpus = build_corpus(
        {
            "vg": [(f"g{i}", basis_11(d)) for i, d in enumerate([0, 1, 2, 5, 6, 7])],
            "vt": [(f"t{i}", basis_11(d)) for i, d in enumerate([0, 1, 2, 3, 4])],
        }
    )
    hand_report = prf(
        Summary(
            keyframes=tuple((f"g{i}", 1.0 - 0.01 * i) for i in range(6)),
            threshold_used=0.01,
        ),
        GroundTruth(annotators={"a1": frozenset(f"t{i}" for i in range(5))}),
        hand_corpus,
        MatchConfig(),
    )
    hand_f = hand_report.per_annotator["a1"].f_score
    hand_ok = abs(hand_f - 2 * 0.5 * 0.6 / 1.1) <= 1e-12

    _report(
        "precision/recall/F matches hand-counted matchings",
        self_ok and disjoint_ok and hand_ok,
        f"self-match 1.0: {self_ok}, disjoint 0.0: {disjoint_ok}, "
        f"hand case F {hand_f:.12f}",
    )


def basis_11(i: int) -> list[float]:
    vec = [0.0] * 11
    vec[i] = 1.0
    return vec


def test_consistency_correctness():
    identical = consistency(
        GroundTruth(annotators={a: frozenset({"f1", "f2"}) for a in ("a1", "a2", "a3")})
    )
    disjoint = consistency(
        GroundTruth(annotators={"a1": frozenset({"f1"}), "a2": frozenset({"f2"})})
    )
    hand = consistency(
        GroundTruth(
            annotators={
                "a1": frozenset({"f1", "f2", "f3", "f4"}),
                "a2": frozenset({"f1", "f2", "f5"}),
                "a3": frozenset({"f2", "f3"}),
            }
        )
    )
    hand_ok = (
        abs(hand.per_annotator["a1"] - 13 / 21) <= 1e-12
        and abs(hand.per_annotator["a2"] - 17 / 35) <= 1e-12
        and abs(hand.per_annotator["a3"] - 8 / 15) <= 1e-12
        and abs(hand.mean - 172 / 315) <= 1e-12
    )
    ok = identical.mean == 1.0 and disjoint.mean == 0.0 and hand_ok
    _report(
        "annotator consistency matches hand-evaluated pairwise F",
        ok,
        f"identical {identical.mean}, disjoint {disjoint.mean}, "
        f"hand mean {hand.mean:.12f} vs {172 / 315:.12f}",
    )


def test_end_to_end_determinism(tmp_path):
    manifest = write_corpus(planted_corpus(per_topic=3, frames_per_video=2), tmp_path / "corpus")
    out = tmp_path / "out"
    truth_path = tmp_path / "truth.json"

    def run_chain() -> dict[str, bytes]:
        assert main(["summarize", str(manifest), "-o", str(out)]) == EXIT_OK
        generated = [
            entry["frame_id"]
            for entry in json.loads((out / "summary.json").read_text())["keyframes"]
        ]
        truth_path.write_text(json.dumps({"a1": generated[:3], "a2": generated[:2]}))
        assert (
            main(["events", str(manifest), str(out / "summary.json"), "-o", str(out)])
            == EXIT_OK
        )
        assert (
            main(
                [
                    "eval",
                    str(manifest),
                    str(out / "summary.json"),
                    str(truth_path),
                    "-o",
                    str(out),
                ]
            )
            == EXIT_OK
        )
        names = ["scores.json", "summary.json", "ekp.json", "ekp.html", "metrics.json"]
        return {name: (out / name).read_bytes() for name in names}

    first = run_chain()
    second = run_chain()
    identical = first == second
    _report(
        "summarize + events + eval produce byte-identical reruns",
        identical,
        f"{len(first)} output files compared",
    )


def test_reference_metrics_recorded_in_docs():
    """Benchmark-scale averages are not reproducible here: they need the full
    1k-video corpus, its annotations, and the original features. The package
    records them as reference constants instead, and acceptance rests on the
    property checks above."""
    readme = Path(__file__).resolve().parent.parent / "README.md"
    text = readme.read_text(encoding="utf-8") if readme.exists() else ""
    needed = ["0.644", "0.490", "0.544", "0.494"]
    missing = [value for value in needed if value not in text]
    _report(
        "benchmark reference metrics are recorded in the README",
        not missing,
        "all present" if not missing else f"missing {missing}",
    )
