"""Translate-then-train cross-lingual transfer.

The labeled source-language training set is machine-translated into the
evaluation language, a featurizer + head are fit on the translated data only,
and the target-language evaluation set is scored raw. Gold scores and pair
order are never touched by translation.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from . import heads
from .corpus import DatasetSplit, LanguageCode, SentencePair
from .embeddings import text_key
from .errors import (
    ConfigError,
    EvalUnlabeled,
    LanguageMismatch,
    ProtocolError,
    ProviderUnreachable,
    TranslationMissing,
)
from .metrics import EvalReport, evaluate_scores
from .pipeline import PairFeaturizer, predict_split, train_supervised

TRANSLATE_ENDPOINT = "/v1/translate"


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class TranslationCache:
    """TSV-backed store of (source hash, source lang, target lang) -> translation."""

    def __init__(self):
        self._rows: dict[tuple[str, str, str], str] = {}

    def __len__(self) -> int:
        return len(self._rows)

    @classmethod
    def load(cls, path: str | Path) -> "TranslationCache":
        cache = cls()
        path = Path(path)
        if not path.exists():
            return cache
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise ConfigError(f"translation cache line {line_no}: expected 4 fields, got {len(parts)}")
                key = (parts[0], parts[1], parts[2])
                translated = _unescape(parts[3])
                if key in cache._rows and cache._rows[key] != translated:
                    raise ConfigError(f"translation cache line {line_no}: conflicting duplicate key")
                cache._rows[key] = translated
        return cache

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for (h, src, tgt), translated in sorted(self._rows.items()):
                fh.write(f"{h}\t{src}\t{tgt}\t{_escape(translated)}\n")

    def get(self, source_hash: str, source_lang: str, target_lang: str) -> str | None:
        return self._rows.get((source_hash, source_lang, target_lang))

    def put(self, source_hash: str, source_lang: str, target_lang: str, translated: str) -> None:
        self._rows[(source_hash, source_lang, target_lang)] = translated


# -------------------------------------------------------------- providers


class TranslationProvider:
    """Interface: order-aligned batch translation for one fixed language pair."""

    source_lang: LanguageCode
    target_lang: LanguageCode
    provider_id: str

    def translate_batch(self, texts: list[str]) -> list[str]:
        raise NotImplementedError


class TableTranslationProvider(TranslationProvider):
    """Fully offline provider; every requested text must be in the table."""

    def __init__(self, mapping: dict[str, str], source_lang: LanguageCode, target_lang: LanguageCode):
        self.source_lang = source_lang
        self.target_lang = target_lang
        self.provider_id = "table"
        self._mapping = mapping

    @classmethod
    def from_texts(
        cls, translations: dict[str, str], source_lang: LanguageCode, target_lang: LanguageCode
    ) -> "TableTranslationProvider":
        """Build from raw source text -> translation (keys are hashed here)."""
        return cls({text_key(s): t for s, t in translations.items()}, source_lang, target_lang)

    @classmethod
    def identity_over(cls, texts: list[str], language: LanguageCode) -> "TableTranslationProvider":
        """Maps every listed text to itself; useful for equivalence checks."""
        return cls({text_key(t): t for t in texts}, language, language)

    @classmethod
    def from_file(
        cls, path: str | Path, source_lang: LanguageCode, target_lang: LanguageCode
    ) -> "TableTranslationProvider":
        cache = TranslationCache.load(path)
        mapping = {
            h: translated
            for (h, src, tgt), translated in cache._rows.items()
            if src == str(source_lang) and tgt == str(target_lang)
        }
        return cls(mapping, source_lang, target_lang)

    def translate_batch(self, texts: list[str]) -> list[str]:
        out = []
        for text in texts:
            h = text_key(text)
            translated = self._mapping.get(h)
            if translated is None:
                raise TranslationMissing(h)
            out.append(translated)
        return out


class HttpTranslationProvider(TranslationProvider):
    """Provider speaking POST /v1/translate against a bridge-compatible service."""

    def __init__(
        self,
        url: str,
        source_lang: LanguageCode,
        target_lang: LanguageCode,
        *,
        batch_size: int = 64,
        max_concurrency: int = 4,
        attempts: int = 3,
        backoff: float = 0.5,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.source_lang = source_lang
        self.target_lang = target_lang
        self.provider_id = f"http:{url}"
        self.batch_size = batch_size
        self.max_concurrency = max_concurrency
        self.attempts = attempts
        self.backoff = backoff
        self._client = httpx.Client(base_url=url.rstrip("/"), timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def _post_chunk(self, texts: list[str]) -> list[str]:
        payload = {"texts": texts, "source": str(self.source_lang), "target": str(self.target_lang)}
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._client.post(TRANSLATE_ENDPOINT, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code == 400:
                raise ProtocolError(f"provider rejected translation request: {response.text}")
            if response.status_code != 200:
                last_error = ProviderUnreachable(f"provider returned {response.status_code}")
                continue
            try:
                translations = response.json()["translations"]
            except (ValueError, KeyError, TypeError) as exc:
                raise ProtocolError(f"malformed translate response: {exc}") from None
            if len(translations) != len(texts):
                raise ProtocolError(f"asked for {len(texts)} translations, got {len(translations)}")
            return [str(t) for t in translations]
        raise ProviderUnreachable(f"translate request failed after {self.attempts} attempts: {last_error}")

    def translate_batch(self, texts: list[str]) -> list[str]:
        chunks = [texts[i : i + self.batch_size] for i in range(0, len(texts), self.batch_size)]
        if len(chunks) <= 1:
            return self._post_chunk(texts) if texts else []
        with ThreadPoolExecutor(max_workers=min(self.max_concurrency, len(chunks))) as pool:
            results = list(pool.map(self._post_chunk, chunks))
        return [t for chunk in results for t in chunk]


# --------------------------------------------------------------- dataset


@dataclass
class TranslatedDataset:
    """Original and translated views of one split, plus per-pair provenance.

    Provenance maps pair_id -> ((sentence1 hash, sentence2 hash), provider id).
    """

    original: DatasetSplit
    translated: DatasetSplit
    provenance: dict[str, tuple[tuple[str, str], str]] = field(default_factory=dict)


def translate_split(
    provider: TranslationProvider,
    split: DatasetSplit,
    cache: TranslationCache | None = None,
) -> TranslatedDataset:
    """Translate both sentences of every pair; scores and order are preserved.

    The cache, when given, is consulted before the provider and updated with
    fresh translations afterwards.
    """
    if provider.source_lang != split.language:
        raise LanguageMismatch(
            f"provider translates from {provider.source_lang}, split is {split.language}"
        )
    src, tgt = str(provider.source_lang), str(provider.target_lang)

    unique: list[str] = []
    seen: set[str] = set()
    for pair in split.pairs:
        for text in (pair.sentence1, pair.sentence2):
            if text not in seen:
                seen.add(text)
                unique.append(text)

    resolved: dict[str, str] = {}
    misses: list[str] = []
    for text in unique:
        hit = cache.get(text_key(text), src, tgt) if cache is not None else None
        if hit is None:
            misses.append(text)
        else:
            resolved[text] = hit
    if misses:
        try:
            translations = provider.translate_batch(misses)
        except TranslationMissing as exc:
            pair_id = next(
                (
                    p.pair_id
                    for p in split.pairs
                    if exc.text_hash in (text_key(p.sentence1), text_key(p.sentence2))
                ),
                None,
            )
            raise TranslationMissing(exc.text_hash, pair_id) from None
        for text, translated in zip(misses, translations):
            resolved[text] = translated
            if cache is not None:
                cache.put(text_key(text), src, tgt, translated)

    pairs = []
    provenance: dict[str, tuple[tuple[str, str], str]] = {}
    for pair in split.pairs:
        pairs.append(
            SentencePair(
                pair_id=pair.pair_id,
                sentence1=resolved[pair.sentence1],
                sentence2=resolved[pair.sentence2],
                score=pair.score,
                language=provider.target_lang,
            )
        )
        provenance[pair.pair_id] = (
            (text_key(pair.sentence1), text_key(pair.sentence2)),
            provider.provider_id,
        )
    translated = DatasetSplit(language=provider.target_lang, split=split.split, pairs=tuple(pairs))
    return TranslatedDataset(original=split, translated=translated, provenance=provenance)


# ----------------------------------------------------------------- track C


@dataclass
class TrackCResult:
    translated: TranslatedDataset
    model: heads.SvrModel | heads.GbtModel
    train_report: heads.TrainReport
    predictions: list[float]
    report: EvalReport | None


def run_track_c(
    train_source: DatasetSplit,
    eval_target: DatasetSplit,
    translation: TranslationProvider,
    featurizer: PairFeaturizer,
    head_kind: str,
    svr_params: heads.SvrParams = heads.SvrParams(),
    gbt_params: heads.GbtParams = heads.GbtParams(),
    *,
    cache: TranslationCache | None = None,
    want_report: bool = True,
    threshold: float = 0.5,
    model_name: str = "",
) -> TrackCResult:
    """Translate the training set, fit on the translation only, score the
    (untranslated) evaluation set."""
    if want_report and not eval_target.labeled:
        raise EvalUnlabeled()
    translated = translate_split(translation, train_source, cache=cache)
    model, train_report = train_supervised(
        translated.translated, featurizer, head_kind, svr_params, gbt_params
    )
    predictions = predict_split(featurizer, model, eval_target)
    report = None
    if want_report:
        report = evaluate_scores(
            eval_target.scores(),
            predictions,
            language=str(eval_target.language),
            track="C",
            model_name=model_name or f"{featurizer.kind}+{head_kind}",
            threshold=threshold,
        )
    return TrackCResult(
        translated=translated,
        model=model,
        train_report=train_report,
        predictions=predictions,
        report=report,
    )
