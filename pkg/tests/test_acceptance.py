"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (visible with ``pytest -s`` or in captured output).

Budgets and tolerances are pinned here and must not be loosened.
"""

from __future__ import annotations

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from semrel import heads, metrics, pipeline, tfidf
from semrel.cli import main
from semrel.crosslingual import run_track_c
from semrel.embeddings import FileEmbeddingProvider, score_pairs_unsupervised

from conftest import make_split, synth_overlap_pairs, write_embedding_cache
from test_cli import base_config, identity_table, xlingual_config
from test_metrics import oracle_spearman
from test_tfidf import brute_force_weights, random_corpus


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


def test_tfidf_oracle_suite():
    with criterion("tfidf-oracle"):
        start = time.perf_counter()
        rng = np.random.default_rng(0xACCE)
        for _ in range(25):
            docs = random_corpus(rng)
            model = tfidf.fit(docs)
            tokens = model.tokens_in_column_order()
            for doc in docs:
                got = {tokens[c]: w for c, w in tfidf.transform(model, doc).entries}
                want = brute_force_weights(docs, doc)
                assert set(got) == set(want)
                for token, weight in want.items():
                    assert abs(got[token] - weight) <= 1e-12 * abs(weight)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"tfidf oracle suite took {elapsed:.2f}s"


def test_spearman_oracle_suite():
    with criterion("spearman-oracle"):
        for n in range(2, 7):
            gold = list(range(n))
            for perm in itertools.permutations(range(n)):
                got = metrics.spearman(gold, list(perm))
                assert abs(got - oracle_spearman(gold, list(perm))) <= 1e-12
        rng = np.random.default_rng(0x5EA)
        checked = 0
        while checked < 100:
            n = int(rng.integers(3, 12))
            gold = rng.integers(0, 5, size=n).astype(float)
            pred = rng.integers(0, 5, size=n).astype(float)
            if np.all(gold == gold[0]) or np.all(pred == pred[0]):
                continue
            got = metrics.spearman(gold, pred)
            assert abs(got - oracle_spearman(list(gold), list(pred))) <= 1e-12
            checked += 1
        assert abs(metrics.spearman([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) <= 1e-12


def test_head_sanity():
    with criterion("head-sanity"):
        start = time.perf_counter()

        # GBT: 8-sample fixture must overfit with a monotone loss trace.
        rng = np.random.default_rng(7)
        X8 = rng.uniform(0, 1, size=(8, 2))
        y8 = rng.uniform(0, 1, size=8)
        _, report = heads.train_gbt(
            X8, y8, heads.GbtParams(max_depth=3, n_rounds=200, shrinkage=0.3, min_samples_leaf=1)
        )
        assert report.final_loss < 1e-3
        for before, after in zip(report.losses, report.losses[1:]):
            assert after <= before + 1e-15

        # SVR: y = x grid against the closed-form least-squares oracle.
        grid = np.array([[0.0], [0.25], [0.5], [0.75], [1.0]])
        y = grid[:, 0]
        model, _ = heads.train_svr(grid, y, heads.SvrParams(epsilon=0.01))
        design = np.hstack([grid, np.ones((5, 1))])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        for x in grid:
            oracle = float(coef[0] * x[0] + coef[1])
            assert abs(heads.predict(model, x) - oracle) <= 0.05

        # SVR subgradient vs central finite differences off the hinge kinks.
        params = heads.SvrParams(epsilon=0.05, c=2.0)
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 20:
            X = rng.normal(size=(12, 3))
            yy = rng.uniform(0, 1, size=12)
            w = rng.normal(scale=0.5, size=3)
            b = float(rng.normal(scale=0.5))
            if np.abs(np.abs(X @ w + b - yy) - params.epsilon).min() < 1e-3:
                continue
            grad_w, grad_b = heads.svr_gradient(w, b, X, yy, params)
            step = 1e-6
            for k in range(3):
                e = np.zeros(3)
                e[k] = step
                numeric = (
                    heads.svr_objective(w + e, b, X, yy, params)
                    - heads.svr_objective(w - e, b, X, yy, params)
                ) / (2 * step)
                assert abs(grad_w[k] - numeric) <= 1e-4 * max(abs(numeric), 1e-8) + 1e-8
            numeric_b = (
                heads.svr_objective(w, b + step, X, yy, params)
                - heads.svr_objective(w, b - step, X, yy, params)
            ) / (2 * step)
            assert abs(grad_b - numeric_b) <= 1e-4 * max(abs(numeric_b), 1e-8) + 1e-8
            checked += 1

        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"head sanity took {elapsed:.2f}s"


# Ten fixture pairs with integer-coordinate vectors; expected cosines are
# evaluated by hand from dot/(|u||v|) next to each entry.
TRACK_B_FIXTURE = [
    # (text1, vec1, text2, vec2, expected cosine)
    ("the same sentence", [1, 2, 3, 4], "the same sentence", [1, 2, 3, 4], 1.0),
    ("unit x", [1, 0, 0, 0], "unit y", [0, 1, 0, 0], 0.0),  # orthogonal
    ("diag xy", [1, 1, 0, 0], "unit x2", [1, 0, 0, 0], 1 / math.sqrt(2)),  # 1/(sqrt2*1)
    ("base 122", [1, 2, 2, 0], "scaled 244", [2, 4, 4, 0], 1.0),  # 18/(3*6)
    ("three four", [3, 4, 0, 0], "four three", [4, 3, 0, 0], 24 / 25),  # 24/(5*5)
    ("plus x", [1, 0, 0, 0], "minus x", [-1, 0, 0, 0], -1.0),
    ("two x", [2, 0, 0, 0], "all ones", [1, 1, 1, 1], 0.5),  # 2/(2*2)
    ("ones", [1, 1, 1, 1], "ones flipped", [1, 1, 1, -1], 0.5),  # 2/(2*2)
    ("zero vector", [0, 0, 0, 0], "anything", [1, 2, 3, 4], 0.0),  # 0-norm convention
    ("one two", [1, 2, 0, 0], "two one", [2, 1, 0, 0], 4 / 5),  # 4/(sqrt5*sqrt5)
]


def test_track_b_pipeline(tmp_path):
    with criterion("track-b-pipeline"):
        vectors: dict[str, list[float]] = {}
        rows = []
        for i, (t1, v1, t2, v2, _) in enumerate(TRACK_B_FIXTURE):
            vectors[t1] = [float(x) for x in v1]
            vectors[t2] = [float(x) for x in v2]
            rows.append((f"P{i}", t1, t2, None))
        cache = tmp_path / "fixture.jsonl"
        write_embedding_cache(cache, vectors)
        provider = FileEmbeddingProvider.from_file(cache)
        split = make_split(rows, split="dev")
        scores = score_pairs_unsupervised(provider, split)
        for got, (t1, _, t2, _, want) in zip(scores.raw, TRACK_B_FIXTURE):
            assert abs(got - want) <= 1e-9, (t1, t2)
            if t1 == t2:
                assert got == 1.0  # identical sentences score exactly 1
        assert scores.bounded == [max(0.0, s) for s in scores.raw]


def test_track_c_equivalence():
    with criterion("track-c-equivalence"):
        rows = synth_overlap_pairs(24, seed=31)
        train = make_split(rows[:16], split="train")
        dev = make_split(rows[16:], split="dev")
        texts = [t for p in train.pairs for t in (p.sentence1, p.sentence2)]
        from semrel.crosslingual import TableTranslationProvider

        provider = TableTranslationProvider.identity_over(texts, train.language)
        for head_kind in ("svr", "gbt"):
            svr_params = heads.SvrParams(epochs=60, seed=123)
            gbt_params = heads.GbtParams(n_rounds=40, seed=123)
            result = run_track_c(
                train, dev, provider,
                pipeline.TfidfPairFeaturizer(projection=tfidf.HashProjection(dimension=64)),
                head_kind, svr_params, gbt_params,
            )
            featurizer = pipeline.TfidfPairFeaturizer(projection=tfidf.HashProjection(dimension=64))
            model, _ = pipeline.train_supervised(train, featurizer, head_kind, svr_params, gbt_params)
            direct = pipeline.predict_split(featurizer, model, dev)
            assert result.predictions == direct, head_kind  # bit-identical


def test_reproducibility(tmp_path):
    with criterion("reproducibility"):
        cfg = base_config(tmp_path)
        assert main(["train", "--config", str(cfg)]) == 0
        assert main(["score", "--config", str(cfg)]) == 0
        first = (tmp_path / "run" / "predictions.csv").read_bytes()
        resolved = tmp_path / "run" / "config.resolved.toml"
        rerun = tmp_path / "rerun"
        assert main(["train", "--config", str(resolved), "--out-dir", str(rerun)]) == 0
        assert main(["score", "--config", str(resolved), "--out-dir", str(rerun)]) == 0
        assert first == (rerun / "predictions.csv").read_bytes()

        # the cross-lingual command honors the same contract end to end
        table = identity_table(tmp_path, tmp_path / "train.csv")
        xcfg = xlingual_config(tmp_path, table)
        assert main(["xlingual", "--config", str(xcfg)]) == 0
        assert first == (tmp_path / "runx" / "predictions.csv").read_bytes()


def test_end_to_end_smoke():
    with criterion("e2e-smoke"):
        start = time.perf_counter()
        rows = synth_overlap_pairs(200, seed=2024)
        train = make_split(rows[:150], split="train")
        dev = make_split(rows[150:], split="dev")
        featurizer = pipeline.TfidfPairFeaturizer()  # 512-dim projection default
        model, report = pipeline.train_supervised(
            train, featurizer, "gbt", gbt_params=heads.GbtParams(seed=2024)
        )
        predictions = pipeline.predict_split(featurizer, model, dev)
        rho = metrics.spearman(dev.scores(), predictions)
        elapsed = time.perf_counter() - start
        assert rho >= 0.8, f"dev spearman {rho:.4f}"
        assert elapsed < 60.0, f"smoke took {elapsed:.1f}s"
        assert all(0.0 <= p <= 1.0 for p in predictions)
