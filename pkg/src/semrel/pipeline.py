"""Shared featurization and supervised-track plumbing.

Both the monolingual supervised track and the translate-then-train track run
through these functions, so an identity translation reproduces the
monolingual pipeline bit for bit.
"""

from __future__ import annotations

import json

import numpy as np

from . import heads, tfidf
from .corpus import DatasetSplit
from .embeddings import EmbeddingProvider, make_embedding_provider
from .errors import ConfigError, CorruptModel, VersionMismatch
from .textprep import TokenizerConfig, normalize, tokenize

FEATURIZER_VERSION = 1

FEATURIZER_KINDS = ("tfidf-pair", "embedding-pair")


class TfidfPairFeaturizer:
    """TF-IDF sentence vectors, signed-hash projected, assembled per pair.

    Each sentence of each training pair counts as one document when fitting.
    """

    kind = "tfidf-pair"

    def __init__(
        self,
        tokenizer: TokenizerConfig = TokenizerConfig(),
        projection: tfidf.HashProjection = tfidf.HashProjection(),
        min_df: int = 1,
    ):
        self.tokenizer = tokenizer
        self.projection = projection
        self.min_df = min_df
        self.model: tfidf.TfidfModel | None = None
        self._table: tfidf.ProjectionTable | None = None

    def _tokens(self, text: str) -> list[str]:
        return tokenize(normalize(text, self.tokenizer), self.tokenizer)

    def fit(self, split: DatasetSplit) -> None:
        documents = []
        for pair in split.pairs:
            documents.append(self._tokens(pair.sentence1))
            documents.append(self._tokens(pair.sentence2))
        self.model = tfidf.fit(documents, self.tokenizer, self.min_df)
        self._table = tfidf.ProjectionTable(self.model, self.projection)

    def _require_fitted(self) -> tfidf.ProjectionTable:
        if self.model is None or self._table is None:
            raise ConfigError("featurizer used before fit()")
        return self._table

    def feature_matrix(self, split: DatasetSplit) -> np.ndarray:
        table = self._require_fitted()
        rows = [
            tfidf.pair_features(self.model, self._tokens(p.sentence1), self._tokens(p.sentence2), table)
            for p in split.pairs
        ]
        return np.vstack(rows) if rows else np.empty((0, 2 * self.projection.dimension + 1))

    def to_dict(self) -> dict:
        if self.model is None:
            raise ConfigError("cannot serialize an unfitted featurizer")
        return {
            "version": FEATURIZER_VERSION,
            "kind": self.kind,
            "projection": {"dimension": self.projection.dimension, "seed": self.projection.seed},
            "min_df": self.min_df,
            "tfidf": tfidf.model_to_dict(self.model),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TfidfPairFeaturizer":
        model = tfidf.model_from_dict(payload["tfidf"])
        projection = tfidf.HashProjection(
            dimension=int(payload["projection"]["dimension"]),
            seed=int(payload["projection"]["seed"]),
        )
        featurizer = cls(tokenizer=model.config, projection=projection, min_df=int(payload.get("min_df", 1)))
        featurizer.model = model
        featurizer._table = tfidf.ProjectionTable(model, projection)
        return featurizer


class EmbeddingPairFeaturizer:
    """Provider-backed dense vectors assembled with the same pair layout."""

    kind = "embedding-pair"

    def __init__(self, provider: EmbeddingProvider, spec: str | None = None):
        self.provider = provider
        self.spec = spec

    def fit(self, split: DatasetSplit) -> None:
        pass  # nothing to fit; the encoder is frozen behind the provider

    def feature_matrix(self, split: DatasetSplit) -> np.ndarray:
        unique: list[str] = []
        seen: set[str] = set()
        for pair in split.pairs:
            for text in (pair.sentence1, pair.sentence2):
                if text not in seen:
                    seen.add(text)
                    unique.append(text)
        vectors = dict(zip(unique, self.provider.embed_batch(unique)))
        rows = [
            tfidf.pair_features_from_dense(vectors[p.sentence1], vectors[p.sentence2])
            for p in split.pairs
        ]
        return np.vstack(rows) if rows else np.empty((0, 2 * self.provider.dimension + 1))

    def to_dict(self) -> dict:
        if not self.spec:
            raise ConfigError("embedding featurizer has no provider spec to serialize")
        return {
            "version": FEATURIZER_VERSION,
            "kind": self.kind,
            "provider": {
                "spec": self.spec,
                "model": self.provider.model_name,
                "dimension": self.provider.dimension,
            },
        }

    @classmethod
    def from_dict(cls, payload: dict, transport=None) -> "EmbeddingPairFeaturizer":
        spec = payload["provider"]["spec"]
        provider = make_embedding_provider(
            spec,
            payload["provider"]["model"],
            int(payload["provider"]["dimension"]),
            transport=transport,
        )
        return cls(provider, spec=spec)


PairFeaturizer = TfidfPairFeaturizer | EmbeddingPairFeaturizer


def featurizer_to_json(featurizer: PairFeaturizer) -> bytes:
    return json.dumps(featurizer.to_dict(), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def featurizer_from_json(data: bytes, transport=None) -> PairFeaturizer:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"unreadable featurizer file: {exc}") from None
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModel("featurizer payload is not an object with a version")
    if payload["version"] != FEATURIZER_VERSION:
        raise VersionMismatch(FEATURIZER_VERSION, payload["version"])
    kind = payload.get("kind")
    try:
        if kind == "tfidf-pair":
            return TfidfPairFeaturizer.from_dict(payload)
        if kind == "embedding-pair":
            return EmbeddingPairFeaturizer.from_dict(payload, transport=transport)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed featurizer payload: {exc}") from None
    raise CorruptModel(f"unknown featurizer kind {kind!r}")


# --------------------------------------------------------------- training


def train_supervised(
    train: DatasetSplit,
    featurizer: PairFeaturizer,
    head_kind: str,
    svr_params: heads.SvrParams = heads.SvrParams(),
    gbt_params: heads.GbtParams = heads.GbtParams(),
) -> tuple[heads.SvrModel | heads.GbtModel, heads.TrainReport]:
    """Fit the featurizer on the training split and train the chosen head."""
    if not train.labeled:
        raise ConfigError("training split must be fully labeled")
    featurizer.fit(train)
    X = featurizer.feature_matrix(train)
    y = train.scores()
    if head_kind == "svr":
        return heads.train_svr(X, y, svr_params)
    if head_kind == "gbt":
        return heads.train_gbt(X, y, gbt_params)
    raise ConfigError(f"unknown head kind {head_kind!r}")


def predict_split(
    featurizer: PairFeaturizer,
    model: heads.SvrModel | heads.GbtModel,
    split: DatasetSplit,
) -> list[float]:
    """Clamped relatedness predictions for every pair, in split order."""
    X = featurizer.feature_matrix(split)
    return [float(v) for v in heads.predict_batch(model, X)]
