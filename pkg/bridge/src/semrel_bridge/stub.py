"""Deterministic stub backends: embeddings from SHA-256 bytes, translations
from a dictionary table. Pure functions of their inputs, so every response is
reproducible bit for bit across runs and machines."""

from __future__ import annotations

import hashlib
import math


def stub_vector(text: str, dimension: int) -> list[float]:
    """Unit-norm vector derived from SHA-256(text).

    Digest bytes are mapped linearly onto [-1, 1]; texts needing more than one
    digest block extend with SHA-256(text || counter).
    """
    data = text.encode("utf-8")
    raw = bytearray()
    block = 0
    while len(raw) < dimension:
        raw.extend(hashlib.sha256(data + block.to_bytes(4, "big")).digest())
        block += 1
    values = [b / 127.5 - 1.0 for b in raw[:dimension]]
    norm = math.sqrt(sum(v * v for v in values))
    return [v / norm for v in values]


def apply_table(text: str, table: dict[str, str]) -> str:
    """Token-wise dictionary translation; unknown tokens are echoed unchanged."""
    return " ".join(table.get(token, token) for token in text.split())
