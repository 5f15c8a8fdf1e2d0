"""TF-IDF vectorizer and pair-level feature assembly for the supervised track.

Weights follow tf(t,d) = ln(1 + freq(t,d)) and idf(t,D) = ln(N / df(t)) with
no smoothing; a term present in every document gets weight 0 and is dropped,
and out-of-vocabulary terms are dropped at transform time. Sparse sentence
vectors are bridged to a fixed-width regressor input by a seeded signed hash
projection.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import CorruptModel, EmptyCorpus, VersionMismatch
from .textprep import TokenizerConfig

MODEL_VERSION = 1

DEFAULT_PROJECTION_DIM = 512
DEFAULT_PROJECTION_SEED = 0x5EED


@dataclass(frozen=True)
class SparseVector:
    """Sorted (column, weight) entries; zero weights are never stored."""

    entries: tuple[tuple[int, float], ...]
    dimension: int

    def __post_init__(self):
        last = -1
        for col, weight in self.entries:
            if not last < col < self.dimension:
                raise ValueError(f"column {col} out of order or out of range")
            if weight == 0.0:
                raise ValueError(f"stored zero weight at column {col}")
            last = col

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        for col, weight in self.entries:
            dense[col] = weight
        return dense


@dataclass
class TfidfModel:
    """Fitted vocabulary: token -> column, token -> document frequency, corpus size."""

    vocabulary: dict[str, int]
    document_frequency: dict[str, int]
    corpus_size: int
    config: TokenizerConfig
    min_df: int = 1

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def idf(self, token: str) -> float:
        return math.log(self.corpus_size / self.document_frequency[token])

    def tokens_in_column_order(self) -> list[str]:
        return sorted(self.vocabulary, key=self.vocabulary.__getitem__)


def fit(documents: list[list[str]], config: TokenizerConfig = TokenizerConfig(), min_df: int = 1) -> TfidfModel:
    """Fit vocabulary and document frequencies; each token list is one document."""
    if not documents:
        raise EmptyCorpus()
    df: Counter[str] = Counter()
    for doc in documents:
        df.update(set(doc))
    kept = sorted(t for t, c in df.items() if c >= min_df)
    vocabulary = {t: i for i, t in enumerate(kept)}
    return TfidfModel(
        vocabulary=vocabulary,
        document_frequency={t: df[t] for t in kept},
        corpus_size=len(documents),
        config=config,
        min_df=min_df,
    )


def transform(model: TfidfModel, doc: list[str]) -> SparseVector:
    """TF-IDF weights for one document; OOV and idf-zero terms are dropped."""
    counts = Counter(doc)
    entries = []
    for token, freq in counts.items():
        col = model.vocabulary.get(token)
        if col is None:
            continue
        weight = math.log1p(freq) * math.log(model.corpus_size / model.document_frequency[token])
        if weight != 0.0:
            entries.append((col, weight))
    entries.sort()
    return SparseVector(entries=tuple(entries), dimension=model.dimension)


# ------------------------------------------------------------ projection


@dataclass(frozen=True)
class HashProjection:
    """Signed-hash bucketing of vocabulary columns into a fixed-width space.

    SHA-256 based, so bucket/sign assignments are identical across runs,
    processes, and platforms for the same seed.
    """

    dimension: int = DEFAULT_PROJECTION_DIM
    seed: int = DEFAULT_PROJECTION_SEED

    def token_slot(self, token: str) -> tuple[int, float]:
        digest = hashlib.sha256(
            self.seed.to_bytes(8, "little", signed=False) + token.encode("utf-8")
        ).digest()
        bucket = int.from_bytes(digest[:8], "little") % self.dimension
        sign = 1.0 if digest[8] & 1 else -1.0
        return bucket, sign


class ProjectionTable:
    """Precomputed column -> (bucket, sign) map for one fitted vocabulary."""

    def __init__(self, model: TfidfModel, projection: HashProjection):
        self.projection = projection
        tokens = model.tokens_in_column_order()
        buckets = np.empty(len(tokens), dtype=np.intp)
        signs = np.empty(len(tokens))
        for col, token in enumerate(tokens):
            buckets[col], signs[col] = projection.token_slot(token)
        self._buckets = buckets
        self._signs = signs

    @property
    def dimension(self) -> int:
        return self.projection.dimension

    def project(self, vec: SparseVector) -> np.ndarray:
        dense = np.zeros(self.projection.dimension)
        for col, weight in vec.entries:
            dense[self._buckets[col]] += self._signs[col] * weight
        return dense


def _dense_cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if np.array_equal(u, v):
        return 1.0
    return min(1.0, max(-1.0, float(u @ v) / (nu * nv)))


def pair_features_from_dense(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Symmetric pair representation: |u-v| block, u*v block, cosine scalar."""
    return np.concatenate([np.abs(u - v), u * v, [_dense_cosine(u, v)]])


def pair_features(
    model: TfidfModel,
    s1_tokens: list[str],
    s2_tokens: list[str],
    projection: HashProjection | ProjectionTable,
) -> np.ndarray:
    """Fixed-width features for one sentence pair (length 2 * d_reduced + 1).

    Pass a prebuilt ProjectionTable when featurizing many pairs against the
    same model; a bare HashProjection rebuilds the table per call.
    """
    table = projection if isinstance(projection, ProjectionTable) else ProjectionTable(model, projection)
    u = table.project(transform(model, s1_tokens))
    v = table.project(transform(model, s2_tokens))
    return pair_features_from_dense(u, v)


# --------------------------------------------------------- serialization


def model_to_dict(model: TfidfModel) -> dict:
    """Versioned payload with tokens in column order; stable for identical inputs."""
    return {
        "version": MODEL_VERSION,
        "config": model.config.to_dict(),
        "min_df": model.min_df,
        "corpus_size": model.corpus_size,
        "entries": [
            [t, model.document_frequency[t], model.vocabulary[t]]
            for t in model.tokens_in_column_order()
        ],
    }


def model_to_json(model: TfidfModel) -> bytes:
    return json.dumps(model_to_dict(model), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def model_from_dict(payload) -> TfidfModel:
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModel("tfidf model payload is not an object with a version")
    if payload["version"] != MODEL_VERSION:
        raise VersionMismatch(MODEL_VERSION, payload["version"])
    try:
        config = TokenizerConfig.from_dict(payload["config"])
        entries = payload["entries"]
        vocabulary = {t: int(col) for t, _, col in entries}
        document_frequency = {t: int(df) for t, df, _ in entries}
        corpus_size = int(payload["corpus_size"])
        min_df = int(payload.get("min_df", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed tfidf model: {exc}") from None
    model = TfidfModel(vocabulary, document_frequency, corpus_size, config, min_df)
    if sorted(vocabulary.values()) != list(range(len(vocabulary))):
        raise CorruptModel("column indices are not a bijection onto 0..V-1")
    for t, df in document_frequency.items():
        if not 1 <= df <= corpus_size:
            raise CorruptModel(f"document frequency of {t!r} outside [1, N]")
    return model


def model_from_json(data: bytes) -> TfidfModel:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"unreadable tfidf model: {exc}") from None
    return model_from_dict(payload)
