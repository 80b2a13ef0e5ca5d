"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line and enforcing its runtime budget.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
happen; under plain pytest they appear in the captured-output section.
"""

from __future__ import annotations

import random
import time
import warnings
from contextlib import contextmanager
from io import BytesIO
from pathlib import Path

import numpy as np
import pytest

from embedaudit.errors import AuditError, FormatError, ValidationError
from embedaudit.ontolex import generate_triplets, parse_ontology, triplet_accuracy, Triplet
from embedaudit.promptgen import random_context, strip_label
from embedaudit.spacelab import class_centroids, pair_histogram
from embedaudit.store import EmbeddingSet, read_embeddings, write_embeddings
from embedaudit.zeroshot import (
    SimilarityMatrix,
    classify,
    cosine,
    evaluate,
    roc_pr_auc,
    similarity_matrix,
    top_k_accuracy,
)

from oracles import (
    ap_threshold_loop,
    brute_triplets,
    random_tree,
    roc_auc_pair_count,
    topk_fraction,
)

GOLDEN = Path(__file__).parent / "golden"


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL: {name}")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, f"{name}: {elapsed:.2f}s exceeded the {budget_s}s budget"
    print(f"PASS: {name} ({elapsed:.2f}s < {budget_s:.0f}s)")


def _tree_from_obj(obj: dict):
    import io as _io
    import json as _json

    return parse_ontology(_io.StringIO(_json.dumps(obj)))


def test_triplet_combinatorics_14_names():
    with criterion("triplet combinatorics: 14 names -> 364 candidate subsets", 1.0):
        obj = {"name": "root", "children": [
            {"name": f"family{j}", "children": [{"name": f"instr{j}_{i}"} for i in range(7)]}
            for j in range(2)
        ]}
        _, stats = generate_triplets(_tree_from_obj(obj))
        assert stats.candidate_names == 14
        assert stats.candidate_subsets == 364
        assert 14 * 13 * 12 // 6 == 364


def test_triplet_conservation_on_random_trees():
    with criterion("triplet conservation + brute-force equality on 20 random trees", 10.0):
        rng = random.Random(20240601)
        for _ in range(20):
            obj = random_tree(rng, rng.randint(4, 50))
            tree = _tree_from_obj(obj)
            triplets, stats = generate_triplets(tree, include_internal=True)
            assert (
                stats.retained + stats.ambiguous_discarded + stats.root_excluded
                == stats.candidate_subsets
            )
            m = stats.candidate_names
            assert stats.candidate_subsets == m * (m - 1) * (m - 2) // 6
            names = [n.name for n in tree.non_root_nodes()]
            expected, ambiguous, excluded = brute_triplets(obj, names)
            assert [t.names() for t in triplets] == expected
            assert stats.ambiguous_discarded == ambiguous
            assert stats.root_excluded == excluded


def test_metric_oracle_equivalence():
    with criterion("metric oracle equivalence on 100 random 50x8 instances", 30.0):
        rng = np.random.default_rng(20240602)
        labels = tuple(f"c{j}" for j in range(8))
        for _ in range(100):
            values = rng.uniform(-1, 1, size=(50, 8))
            truths = [labels[rng.integers(8)] for _ in range(50)]
            truth = {f"r{i}": t for i, t in enumerate(truths)}
            sim = SimilarityMatrix(tuple(f"r{i}" for i in range(50)), labels, values)

            rows = [
                {label: values[i, k] for k, label in enumerate(labels)} for i in range(50)
            ]
            acc = top_k_accuracy(sim, truth, [1, 2, 3])
            for k in (1, 2, 3):
                assert abs(acc[k] - topk_fraction(rows, truths, k)) < 1e-9

            auc = roc_pr_auc(sim, truth)
            rocs, prs = [], []
            for k, label in enumerate(labels):
                positive = [t == label for t in truths]
                if not any(positive) or all(positive):
                    assert label in auc.skipped
                    continue
                scores = list(values[:, k])
                roc, pr = auc.per_class[label]
                roc_ref = roc_auc_pair_count(scores, positive)
                pr_ref = ap_threshold_loop(scores, positive)
                assert abs(roc - roc_ref) < 1e-9
                assert abs(pr - pr_ref) < 1e-9
                rocs.append(roc_ref)
                prs.append(pr_ref)
            assert abs(auc.roc_auc - sum(rocs) / len(rocs)) < 1e-9
            assert abs(auc.pr_auc - sum(prs) / len(prs)) < 1e-9

            hist = pair_histogram(sim, truth, bins=30)
            scores, positive = [], []
            for i in range(50):
                for k, label in enumerate(labels):
                    scores.append(values[i, k])
                    positive.append(truths[i] == label)
            assert abs(hist.pooled_pair_auc - roc_auc_pair_count(scores, positive)) < 1e-9


def test_separable_synthetic_sanity():
    with criterion("separable synthetic: 14 orthogonal classes + noise 0.05", 10.0):
        rng = np.random.default_rng(20240603)
        classes = [f"class{j:02d}" for j in range(14)]
        basis = np.eye(14)
        ids, rows, truth = [], [], {}
        for j, label in enumerate(classes):
            for i in range(50):
                ids.append(f"{label}_{i}")
                rows.append(basis[j] + rng.normal(scale=0.05, size=14))
                truth[ids[-1]] = label
        audio = EmbeddingSet(tuple(ids), np.asarray(rows))

        centroids = class_centroids(audio, truth)
        result = evaluate(audio, truth, centroids, ks=[1])
        assert result.top_k[1] >= 0.99
        assert result.roc_auc >= 0.999

        sim = similarity_matrix(audio, centroids)
        hist = pair_histogram(sim, truth, bins=50)
        assert hist.pooled_pair_auc >= 0.999
        assert hist.overlap_coefficient <= 0.01


def test_null_model_calibration():
    with criterion("null model: random scores, 2 balanced classes, 10k recordings", 5.0):
        rng = np.random.default_rng(20240604)
        n = 10_000
        values = rng.uniform(-1, 1, size=(n, 2))
        ids = tuple(f"r{i}" for i in range(n))
        truth = {ids[i]: ("pos" if i % 2 == 0 else "neg") for i in range(n)}
        sim = SimilarityMatrix(ids, ("neg", "pos"), values)
        auc = roc_pr_auc(sim, truth)
        assert abs(auc.roc_auc - 0.5) <= 0.02


def test_invariance_suite():
    with criterion("invariance suite: scale, monotone k, permutation, cosine", 30.0):
        rng = np.random.default_rng(20240605)

        # cosine symmetry and self-similarity
        for _ in range(300):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert abs(cosine(a, b) - cosine(b, a)) <= 1e-6
            assert abs(cosine(a, a) - 1.0) <= 1e-6

        labels = EmbeddingSet(tuple(f"c{j}" for j in range(5)), rng.normal(size=(5, 6)))
        for _ in range(20):
            n = int(rng.integers(5, 30))
            ids = [f"r{i}" for i in range(n)]
            matrix = rng.normal(size=(n, 6))
            truth = {id_: f"c{rng.integers(5)}" for id_ in ids}
            audio = EmbeddingSet(tuple(ids), matrix)

            # positive-scale invariance of rankings
            scales = rng.uniform(0.01, 100.0, size=n)
            scaled = EmbeddingSet(tuple(ids), matrix * scales[:, None])
            base_sim = similarity_matrix(audio, labels)
            scaled_sim = similarity_matrix(scaled, labels)
            assert np.allclose(base_sim.values, scaled_sim.values, atol=1e-12)
            assert classify(base_sim) == classify(scaled_sim)

            # top-k monotone in k
            acc = top_k_accuracy(base_sim, truth, range(1, 6))
            assert all(acc[k] <= acc[k + 1] for k in range(1, 5))
            assert acc[5] == 1.0

            # permutation invariance of aggregates
            perm = rng.permutation(n)
            base = evaluate(audio, truth, labels, ks=[1, 2])
            shuffled = evaluate(
                EmbeddingSet(tuple(ids[i] for i in perm), matrix[perm]), truth, labels, ks=[1, 2]
            )
            assert base.top_k == shuffled.top_k
            assert base.roc_auc == shuffled.roc_auc
            assert base.pr_auc == shuffled.pr_auc

        # triplet verdicts are scale invariant
        names = tuple(f"w{j}" for j in range(8))
        for _ in range(10):
            matrix = rng.normal(size=(8, 5))
            triplets = []
            for _ in range(20):
                a, p, ng = rng.choice(8, size=3, replace=False)
                triplets.append(Triplet(names[a], names[p], names[ng]))
            base_score = triplet_accuracy(triplets, EmbeddingSet(names, matrix))
            scaled_score = triplet_accuracy(triplets, EmbeddingSet(names, matrix * 31.0))
            assert [v.correct for v in base_score.verdicts] == [
                v.correct for v in scaled_score.verdicts
            ]


def test_format_golden_files():
    with criterion("format: golden parse, 50 round-trips, malformed rejections", 5.0):
        golden = read_embeddings(GOLDEN / "golden.emb1")
        assert golden.ids == ("flute", "oboe", "violin")
        assert golden.dim == 4
        assert golden.matrix.tolist() == [
            [1.0, 0.0, 0.25, -2.0],
            [0.5, -0.5, 3.0, 0.125],
            [-1.5, 2.5, 0.0625, 8.0],
        ]
        # the writer reproduces the committed bytes exactly
        sink = BytesIO()
        write_embeddings(golden, sink)
        assert sink.getvalue() == (GOLDEN / "golden.emb1").read_bytes()

        rng = np.random.default_rng(20240606)
        for trial in range(50):
            n = int(rng.integers(0, 20))
            dim = int(rng.integers(1, 12))
            matrix = rng.normal(size=(n, dim)).astype(np.float32).astype(np.float64)
            ids = tuple(f"s{trial}_{i}" for i in range(n))
            original = EmbeddingSet(ids, matrix)
            buffer = BytesIO()
            write_embeddings(original, buffer)
            back = read_embeddings(BytesIO(buffer.getvalue()))
            assert back.ids == original.ids
            assert np.array_equal(back.matrix, original.matrix)

        expectations = {
            "bad_magic.emb1": (FormatError, "magic"),
            "truncated.emb1": (FormatError, "truncated"),
            "trailing.emb1": (FormatError, "trailing"),
            "duplicate_id.emb1": (ValidationError, "duplicate"),
            "nonfinite.emb1": (ValidationError, "non-finite"),
            "zero_vector.emb1": (ValidationError, "zero"),
            "empty_id.emb1": (FormatError, "empty id"),
            "zero_dim.emb1": (FormatError, "dimension"),
        }
        for name, (kind, needle) in expectations.items():
            with pytest.raises(kind, match=needle):
                read_embeddings(GOLDEN / "malformed" / name)


def test_prompt_transforms():
    with criterion("prompt transforms: strip property x1000, seeded determinism", 5.0):
        rng = random.Random(20240607)
        import re

        vocabulary = ["the", "a", "sound", "of", "music", "track", "solo", "with", "deep"]
        labels = ["violin", "french horn", "tuba", "alto saxophone", "oboe"]
        for _ in range(1000):
            label = rng.choice(labels)
            words = [
                rng.choice(vocabulary + label.split() + [label.upper(), label.capitalize()])
                for _ in range(rng.randint(0, 14))
            ]
            text = " ".join(words)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                stripped = strip_label(text, label)
            assert "  " not in stripped
            assert stripped == stripped.strip()
            for word in label.split():
                assert not re.search(rf"\b{re.escape(word)}\b", stripped, re.IGNORECASE)

        pool = [f"word{i}" for i in range(25)]
        for seed in range(50):
            first = random_context("violin", pool, 7, seed=seed)
            second = random_context("violin", pool, 7, seed=seed)
            assert first == second
        distinct = {random_context("violin", pool, 7, seed=s) for s in range(100)}
        assert len(distinct) > 50
