"""Embedding providers and the unsupervised cosine-relatedness scorer.

A provider is any source of fixed-dimension sentence vectors: a JSON-lines
cache file keyed by SHA-256 of the text, or an HTTP service speaking the
/v1/embed wire protocol. The scoring algorithm is: embed sentence 1, embed
sentence 2, take the cosine of the two vectors.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import httpx
import numpy as np

from .corpus import DatasetSplit
from .errors import (
    DimensionMismatch,
    DimensionViolation,
    MissingEmbedding,
    ProtocolError,
    ProviderUnreachable,
)

EMBED_ENDPOINT = "/v1/embed"


def text_key(text: str) -> str:
    """Lowercase hex SHA-256 of the UTF-8 text; the cache-file key."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs score 0, identical
    vectors score exactly 1."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"cosine of {u.shape} against {v.shape}")
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if np.array_equal(u, v):
        return 1.0
    return min(1.0, max(-1.0, float(u @ v) / (nu * nv)))


# -------------------------------------------------------------- providers


class EmbeddingProvider:
    """Interface: order-aligned batch embedding with a declared dimension."""

    model_name: str
    dimension: int

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        raise NotImplementedError


class FileEmbeddingProvider(EmbeddingProvider):
    """Offline provider backed by a JSON-lines cache of precomputed vectors."""

    def __init__(self, vectors: dict[str, np.ndarray], model_name: str, dimension: int):
        self.model_name = model_name
        self.dimension = dimension
        self._vectors = vectors

    @classmethod
    def from_file(cls, path: str | Path, model_name: str | None = None) -> "FileEmbeddingProvider":
        records = read_cache_file(path)
        models = sorted({model for _, model, _ in records})
        if model_name is None:
            if len(models) != 1:
                raise ProtocolError(f"cache holds models {models}; pass an explicit model name")
            model_name = models[0]
        vectors: dict[str, np.ndarray] = {}
        dimension: int | None = None
        for key, model, vector in records:
            if model != model_name:
                continue
            if dimension is None:
                dimension = len(vector)
            elif len(vector) != dimension:
                raise DimensionViolation(dimension, len(vector))
            if key in vectors:
                raise ProtocolError(f"duplicate cache key {key[:12]}… for model {model_name!r}")
            vectors[key] = np.asarray(vector, dtype=np.float64)
        if dimension is None:
            raise ProtocolError(f"cache holds no vectors for model {model_name!r}")
        return cls(vectors, model_name, dimension)

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        out = []
        for index, text in enumerate(texts):
            vector = self._vectors.get(text_key(text))
            if vector is None:
                raise MissingEmbedding(index)
            out.append(vector)
        return out


class HttpEmbeddingProvider(EmbeddingProvider):
    """Provider speaking POST /v1/embed against a bridge or compatible service.

    Requests are chunked, issued with bounded concurrency, and retried
    idempotently on transient failures (connection errors, 5xx). Results are
    cached in-process for the life of the provider.
    """

    def __init__(
        self,
        url: str,
        model_name: str,
        dimension: int,
        *,
        batch_size: int = 64,
        max_concurrency: int = 4,
        attempts: int = 3,
        backoff: float = 0.5,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.model_name = model_name
        self.dimension = dimension
        self.batch_size = batch_size
        self.max_concurrency = max_concurrency
        self.attempts = attempts
        self.backoff = backoff
        self._client = httpx.Client(base_url=url.rstrip("/"), timeout=timeout, transport=transport)
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def close(self) -> None:
        self._client.close()

    def _post_chunk(self, texts: list[str]) -> list[np.ndarray]:
        payload = {"model": self.model_name, "texts": texts}
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._client.post(EMBED_ENDPOINT, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in (400, 404):
                raise ProtocolError(f"provider rejected request ({response.status_code}): {response.text}")
            if response.status_code != 200:
                last_error = ProviderUnreachable(f"provider returned {response.status_code}")
                continue
            try:
                body = response.json()
                vectors = body["vectors"]
            except (ValueError, KeyError, TypeError) as exc:
                raise ProtocolError(f"malformed embed response: {exc}") from None
            if len(vectors) != len(texts):
                raise ProtocolError(f"asked for {len(texts)} vectors, got {len(vectors)}")
            out = []
            for vector in vectors:
                if len(vector) != self.dimension:
                    raise DimensionViolation(self.dimension, len(vector))
                out.append(np.asarray(vector, dtype=np.float64))
            return out
        raise ProviderUnreachable(f"embed request failed after {self.attempts} attempts: {last_error}")

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        with self._lock:
            misses = []
            seen = set()
            for text in texts:
                if text not in self._cache and text not in seen:
                    seen.add(text)
                    misses.append(text)
        if misses:
            chunks = [misses[i : i + self.batch_size] for i in range(0, len(misses), self.batch_size)]
            if len(chunks) == 1:
                results = [self._post_chunk(chunks[0])]
            else:
                with ThreadPoolExecutor(max_workers=min(self.max_concurrency, len(chunks))) as pool:
                    results = list(pool.map(self._post_chunk, chunks))
            with self._lock:
                for chunk, vectors in zip(chunks, results):
                    for text, vector in zip(chunk, vectors):
                        self._cache[text] = vector
        with self._lock:
            return [self._cache[text] for text in texts]


def make_embedding_provider(
    spec: str,
    model_name: str | None = None,
    dimension: int | None = None,
    *,
    transport: httpx.BaseTransport | None = None,
) -> EmbeddingProvider:
    """Build a provider from a spec string: ``file:<path>`` or an HTTP URL."""
    if spec.startswith("file:"):
        return FileEmbeddingProvider.from_file(spec[len("file:") :], model_name)
    if spec.startswith(("http://", "https://")):
        if not model_name:
            raise ProtocolError("HTTP embedding provider needs a model name")
        if not dimension:
            raise ProtocolError("HTTP embedding provider needs a declared dimension")
        return HttpEmbeddingProvider(spec, model_name, dimension, transport=transport)
    raise ProtocolError(f"unrecognized embedding provider spec {spec!r}")


# ------------------------------------------------------------ cache file


def read_cache_file(path: str | Path) -> list[tuple[str, str, list[float]]]:
    """Load JSON-lines embedding records as (key, model, vector) tuples."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append((obj["key"], obj["model"], list(obj["vector"])))
            except (ValueError, KeyError, TypeError) as exc:
                raise ProtocolError(f"cache line {line_no}: {exc}") from None
    return records


def write_cache_file(path: str | Path, records: list[tuple[str, str, list[float]]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, model, vector in records:
            fh.write(json.dumps({"key": key, "model": model, "vector": list(vector)}) + "\n")


# ----------------------------------------------------------- track B core


@dataclass
class UnsupervisedScores:
    """Raw cosines (rank metrics use these) and the [0,1]-clamped view."""

    raw: list[float]
    bounded: list[float]


def score_pairs_unsupervised(provider: EmbeddingProvider, split: DatasetSplit) -> UnsupervisedScores:
    """Embed both sentences of every pair and score by cosine, in split order."""
    unique: list[str] = []
    seen: set[str] = set()
    for pair in split.pairs:
        for text in (pair.sentence1, pair.sentence2):
            if text not in seen:
                seen.add(text)
                unique.append(text)
    vectors = dict(zip(unique, provider.embed_batch(unique)))
    raw = [cosine(vectors[p.sentence1], vectors[p.sentence2]) for p in split.pairs]
    return UnsupervisedScores(raw=raw, bounded=[max(0.0, score) for score in raw])
