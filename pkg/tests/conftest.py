from __future__ import annotations

import json

import numpy as np
import pytest

from semrel.corpus import DatasetSplit, LanguageCode, SentencePair


def make_split(
    rows: list[tuple[str, str, str, float | None]],
    language: str = "eng",
    split: str = "train",
) -> DatasetSplit:
    lang = LanguageCode(language)
    pairs = tuple(SentencePair(pid, s1, s2, score, lang) for pid, s1, s2, score in rows)
    return DatasetSplit(language=lang, split=split, pairs=pairs)


def jaccard(s1: str, s2: str) -> float:
    a, b = set(s1.split()), set(s2.split())
    if not a | b:
        return 0.0
    return len(a & b) / len(a | b)


def synth_overlap_pairs(n: int, seed: int, id_prefix: str = "P") -> list[tuple[str, str, str, float]]:
    """Pairs of token-set sentences whose gold score is their Jaccard overlap.

    Overlap sizes are spread over the full range so the signal covers [0, 1].
    """
    rng = np.random.default_rng(seed)
    vocab = [f"w{i:02d}" for i in range(60)]
    rows = []
    for i in range(n):
        size = 8
        k = int(rng.integers(0, size + 1))
        words = list(rng.choice(len(vocab), size=2 * size - k, replace=False))
        shared = words[:k]
        only1 = words[k:size]
        only2 = words[size:]
        s1 = [vocab[w] for w in shared + only1]
        s2 = [vocab[w] for w in shared + only2]
        rng.shuffle(s1)
        rng.shuffle(s2)
        rows.append((f"{id_prefix}{i:04d}", " ".join(s1), " ".join(s2), jaccard(" ".join(s1), " ".join(s2))))
    return rows


@pytest.fixture
def overlap_split() -> DatasetSplit:
    return make_split(synth_overlap_pairs(24, seed=11))


def write_embedding_cache(path, vectors: dict[str, list[float]], model: str = "fixture") -> None:
    """JSON-lines cache keyed by SHA-256 of each text."""
    from semrel.embeddings import text_key

    with open(path, "w", encoding="utf-8") as fh:
        for text, vector in vectors.items():
            fh.write(json.dumps({"key": text_key(text), "model": model, "vector": vector}) + "\n")
