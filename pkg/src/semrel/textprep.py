"""Unicode normalization and n-gram tokenization feeding the TF-IDF vectorizer."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigError

# Joins n-gram components; scrubbed from input during normalization so it can
# never collide with natural text.
NGRAM_SEPARATOR = "␟"

UNITS = ("word", "character")


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    ngram_min: int = 1
    ngram_max: int = 1
    unit: str = "word"

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ConfigError(f"unit must be one of {UNITS}, got {self.unit!r}")
        if not 1 <= self.ngram_min <= self.ngram_max <= 5:
            raise ConfigError(
                f"need 1 <= ngram_min <= ngram_max <= 5, got ({self.ngram_min}, {self.ngram_max})"
            )

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "ngram_min": self.ngram_min,
            "ngram_max": self.ngram_max,
            "unit": self.unit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TokenizerConfig":
        return cls(**data)


@lru_cache(maxsize=4096)
def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize(text: str, config: TokenizerConfig = TokenizerConfig()) -> str:
    """NFC-normalize, optionally case-fold and strip punctuation, collapse whitespace.

    Total function: any input string maps to a (possibly empty) cleaned string.
    Case folding leaves caseless scripts such as Devanagari untouched.
    """
    text = unicodedata.normalize("NFC", text)
    text = text.replace(NGRAM_SEPARATOR, " ")
    if config.lowercase:
        text = text.casefold()
    if config.strip_punctuation:
        text = "".join(" " if _is_punctuation(ch) else ch for ch in text)
    return " ".join(text.split())


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Emit n-gram tokens from an already-normalized text.

    Word units split on whitespace; character units are code points including
    inter-word spaces. For each position, n-grams of each size in
    [ngram_min, ngram_max] are emitted left to right, n ascending.
    """
    if config.unit == "word":
        units = text.split()
    else:
        units = list(text)
    out: list[str] = []
    count = len(units)
    for i in range(count):
        for n in range(config.ngram_min, config.ngram_max + 1):
            if i + n <= count:
                out.append(NGRAM_SEPARATOR.join(units[i : i + n]))
    return out
