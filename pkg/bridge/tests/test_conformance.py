"""Conformance: the stub bridge driven end-to-end through the semrel toolkit's
own HTTP providers, over real sockets."""

from __future__ import annotations

import math
import threading
import time

import numpy as np
import pytest
import uvicorn

from semrel.corpus import DatasetSplit, LanguageCode, SentencePair
from semrel.crosslingual import HttpTranslationProvider
from semrel.embeddings import HttpEmbeddingProvider, score_pairs_unsupervised
from semrel.errors import ProtocolError

from semrel_bridge.app import create_app
from semrel_bridge.config import BridgeConfig

STUB_CONFIG = BridgeConfig(
    mode="stub",
    stub_dimension=16,
    translation_tables={"esp-eng": {"hola": "hello", "gato": "cat"}},
)


class _Server:
    def __init__(self, config: BridgeConfig):
        self._server = uvicorn.Server(
            uvicorn.Config(create_app(config), host="127.0.0.1", port=0, log_level="warning")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> str:
        self._thread.start()
        deadline = time.time() + 15
        while not self._server.started:
            if time.time() > deadline:
                raise RuntimeError("bridge did not start")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc):
        self._server.should_exit = True
        self._thread.join(timeout=10)


@pytest.fixture(scope="module")
def bridge_url():
    with _Server(STUB_CONFIG) as url:
        yield url


def test_provider_roundtrip_order_and_dedup(bridge_url):
    provider = HttpEmbeddingProvider(bridge_url, "stub", 16, backoff=0.01)
    out = provider.embed_batch(["a", "b", "a"])
    assert len(out) == 3
    assert np.array_equal(out[0], out[2])
    assert not np.array_equal(out[0], out[1])


def test_provider_vectors_unit_norm(bridge_url):
    provider = HttpEmbeddingProvider(bridge_url, "stub", 16, backoff=0.01)
    for vector in provider.embed_batch(["x", "yy", "zzz"]):
        assert abs(math.sqrt(float(vector @ vector)) - 1.0) <= 1e-6


def test_provider_unknown_model_is_protocol_error(bridge_url):
    provider = HttpEmbeddingProvider(bridge_url, "missing-model", 16, backoff=0.01)
    with pytest.raises(ProtocolError):
        provider.embed_batch(["a"])


def test_determinism_across_server_restarts():
    with _Server(STUB_CONFIG) as url:
        first = HttpEmbeddingProvider(url, "stub", 16, backoff=0.01).embed_batch(["a", "b"])
    with _Server(STUB_CONFIG) as url:
        second = HttpEmbeddingProvider(url, "stub", 16, backoff=0.01).embed_batch(["a", "b"])
    for u, v in zip(first, second):
        assert u.tolist() == v.tolist()  # bit-for-bit
    from semrel.embeddings import cosine

    assert cosine(first[0], first[1]) == cosine(second[0], second[1])


def _make_split(rows):
    eng = LanguageCode("eng")
    pairs = tuple(SentencePair(pid, s1, s2, None, eng) for pid, s1, s2 in rows)
    return DatasetSplit(language=eng, split="dev", pairs=pairs)


def test_track_b_pipeline_over_stub_bridge(bridge_url):
    split = _make_split(
        [
            ("P1", "the cat sat", "the cat sat"),
            ("P2", "the cat sat", "a dog barked"),
            ("P3", "completely different", "things entirely"),
            ("P4", "short", "short text"),
            ("P5", "one more pair", "one more pair"),
        ]
    )
    provider = HttpEmbeddingProvider(bridge_url, "stub", 16, backoff=0.01)
    scores = score_pairs_unsupervised(provider, split)
    assert len(scores.raw) == 5
    assert scores.raw[0] == 1.0  # identical sentences
    assert scores.raw[4] == 1.0
    assert all(-1.0 <= s <= 1.0 for s in scores.raw)
    assert all(0.0 <= s <= 1.0 for s in scores.bounded)
    assert scores.bounded == [max(0.0, s) for s in scores.raw]


def test_translation_provider_over_stub_bridge(bridge_url):
    provider = HttpTranslationProvider(
        bridge_url, LanguageCode("esp"), LanguageCode("eng"), backoff=0.01
    )
    assert provider.translate_batch(["hola gato", "hola amigo"]) == ["hello cat", "hello amigo"]


def test_translation_unsupported_pair_over_bridge(bridge_url):
    provider = HttpTranslationProvider(
        bridge_url, LanguageCode("deu"), LanguageCode("eng"), backoff=0.01
    )
    with pytest.raises(ProtocolError):
        provider.translate_batch(["hallo"])
