"""Real-mode encoder registry wrapping sentence-transformers.

Models load lazily in a background thread on first request; callers see 503
until the model is ready. Inference is serialized per model. Vectors are
mean-pooled and L2-normalized (the pooling choice is visible through
/v1/health model metadata).
"""

from __future__ import annotations

import threading

from .config import EncoderSpec


class ModelStillLoading(Exception):
    pass


class ModelLoadFailed(Exception):
    pass


class EncoderRegistry:
    def __init__(self, specs: dict[str, EncoderSpec]):
        self._specs = specs
        self._encoders: dict[str, object] = {}
        self._loading: set[str] = set()
        self._errors: dict[str, str] = {}
        self._lock = threading.Lock()
        self._model_locks = {name: threading.Lock() for name in specs}

    def known(self, name: str) -> bool:
        return name in self._specs

    def dimension(self, name: str) -> int:
        return self._specs[name].dimension

    def loading(self) -> list[str]:
        with self._lock:
            return sorted(self._loading)

    def ready(self) -> list[str]:
        with self._lock:
            return sorted(self._encoders)

    def _load_in_background(self, name: str) -> None:
        try:
            from sentence_transformers import SentenceTransformer

            encoder = SentenceTransformer(self._specs[name].source)
            with self._lock:
                self._encoders[name] = encoder
        except Exception as exc:
            with self._lock:
                self._errors[name] = f"{type(exc).__name__}: {exc}"
        finally:
            with self._lock:
                self._loading.discard(name)

    def encode(self, name: str, texts: list[str]) -> list[list[float]]:
        with self._lock:
            error = self._errors.get(name)
            if error is not None:
                raise ModelLoadFailed(error)
            encoder = self._encoders.get(name)
            if encoder is None:
                if name not in self._loading:
                    self._loading.add(name)
                    threading.Thread(target=self._load_in_background, args=(name,), daemon=True).start()
                raise ModelStillLoading(name)
        with self._model_locks[name]:
            vectors = encoder.encode(texts, normalize_embeddings=True, convert_to_numpy=True)
        return [[float(v) for v in row] for row in vectors]
