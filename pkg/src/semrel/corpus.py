"""Data model and CSV ingestion for SemRel-format sentence-pair datasets.

Two on-disk encodings are accepted: a 3-column form (``PairID,Text,Score``)
where ``Text`` holds both sentences joined by a newline inside one quoted
field, and an explicit 4-column form (``PairID,Sentence1,Sentence2,Score``).
The Score column is optional in both, so unlabeled test files parse cleanly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import (
    DuplicatePairId,
    EmptySentence,
    LengthMismatch,
    MalformedRow,
    ScoreOutOfRange,
)

KNOWN_LANGUAGES = ("eng", "hin", "mar", "esp")
SPLIT_TAGS = ("train", "dev", "test")

PREDICTIONS_HEADER = "PairID,Pred_Score"


@dataclass(frozen=True)
class LanguageCode:
    """Language tag; the four studied languages are recognized, anything else
    is carried as an open extension."""

    code: str

    def __post_init__(self):
        cleaned = self.code.strip().lower()
        if not cleaned:
            raise ValueError("empty language code")
        object.__setattr__(self, "code", cleaned)

    @property
    def known(self) -> bool:
        return self.code in KNOWN_LANGUAGES

    def __str__(self) -> str:
        return self.code


@dataclass(frozen=True)
class SentencePair:
    """One labeled example: two texts and an optional relatedness score in [0, 1]."""

    pair_id: str
    sentence1: str
    sentence2: str
    score: float | None
    language: LanguageCode


@dataclass(frozen=True)
class DatasetSplit:
    """An ordered, immutable list of pairs for one (language, split) cell.

    Order is preserved exactly as read: prediction files must align row-for-row.
    """

    language: LanguageCode
    split: str
    pairs: tuple[SentencePair, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def labeled(self) -> bool:
        return len(self.pairs) > 0 and all(p.score is not None for p in self.pairs)

    def scores(self) -> list[float]:
        """Gold scores in split order; requires a fully labeled split."""
        out = []
        for p in self.pairs:
            if p.score is None:
                raise ValueError(f"pair {p.pair_id} has no gold score")
            out.append(p.score)
        return out


def _parse_score(cell: str, row: int) -> float | None:
    text = cell.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(row, f"score {cell!r} is not a number") from None
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ScoreOutOfRange(row, value)
    return value


def _detect_form(header: list[str]) -> str:
    names = [h.strip().lower() for h in header]
    if "text" in names:
        return "text3"
    if "sentence1" in names or "sentence2" in names:
        return "cols4"
    raise MalformedRow(1, f"cannot detect file format from header {header!r}; pass --format")


def parse_semrel_csv(
    data: bytes,
    language: LanguageCode,
    split: str,
    form: str = "auto",
) -> DatasetSplit:
    """Parse a SemRel CSV byte stream into a DatasetSplit.

    ``form`` is one of ``auto``, ``text3``, ``cols4``; ``auto`` routes on the
    header names. Raises MalformedRow / ScoreOutOfRange / DuplicatePairId /
    EmptySentence with the offending 1-based row number.
    """
    if split not in SPLIT_TAGS:
        raise ValueError(f"unknown split tag {split!r}")
    if form not in ("auto", "text3", "cols4"):
        raise ValueError(f"unknown format {form!r}")

    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(1, "file is empty, expected a header row") from None
    if form == "auto":
        form = _detect_form(header)

    expected_cols = 2 if form == "text3" else 3
    has_score = len(header) > expected_cols

    pairs: list[SentencePair] = []
    seen: set[str] = set()
    for row_no, cells in enumerate(reader, start=2):
        if not cells:
            continue  # blank trailing line
        if len(cells) not in (expected_cols, expected_cols + 1):
            raise MalformedRow(row_no, f"expected {expected_cols} or {expected_cols + 1} columns, got {len(cells)}")
        pair_id = cells[0].strip()
        if not pair_id:
            raise MalformedRow(row_no, "empty PairID")
        if pair_id in seen:
            raise DuplicatePairId(row_no, pair_id)
        seen.add(pair_id)

        if form == "text3":
            body = cells[1]
            if "\n" not in body:
                raise MalformedRow(row_no, "Text field has no embedded newline separating the sentences")
            first, rest = body.split("\n", 1)
            s1, s2 = first.rstrip("\r"), rest
        else:
            s1, s2 = cells[1], cells[2]
        s1, s2 = s1.strip(), s2.strip()
        if not s1:
            raise EmptySentence(row_no, "sentence1")
        if not s2:
            raise EmptySentence(row_no, "sentence2")

        score = None
        if has_score and len(cells) == expected_cols + 1:
            score = _parse_score(cells[expected_cols], row_no)

        pairs.append(SentencePair(pair_id, s1, s2, score, language))

    return DatasetSplit(language=language, split=split, pairs=tuple(pairs))


def write_split_csv(split: DatasetSplit) -> bytes:
    """Render a DatasetSplit in the 4-column form (used to persist translated sets)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["PairID", "Sentence1", "Sentence2", "Score"])
    for p in split.pairs:
        score = "" if p.score is None else f"{p.score:.6f}"
        writer.writerow([p.pair_id, p.sentence1, p.sentence2, score])
    return buf.getvalue().encode("utf-8")


def write_predictions(split: DatasetSplit, scores: list[float]) -> bytes:
    """Emit the shared-task prediction CSV, one row per pair in split order."""
    if len(scores) != len(split.pairs):
        raise LengthMismatch(len(split.pairs), len(scores), "scores")
    for s in scores:
        if not math.isfinite(s):
            raise ValueError(f"non-finite prediction {s!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["PairID", "Pred_Score"])
    for pair, s in zip(split.pairs, scores):
        writer.writerow([pair.pair_id, f"{s:.6f}"])
    return buf.getvalue().encode("utf-8")


def read_predictions(data: bytes) -> list[tuple[str, float]]:
    """Parse a prediction CSV back into (pair_id, score) rows, order preserved."""
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(1, "prediction file is empty") from None
    names = [h.strip().lower() for h in header]
    if len(names) != 2 or names[0] != "pairid":
        raise MalformedRow(1, f"unexpected prediction header {header!r}")
    rows: list[tuple[str, float]] = []
    seen: set[str] = set()
    for row_no, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != 2:
            raise MalformedRow(row_no, f"expected 2 columns, got {len(cells)}")
        pair_id = cells[0].strip()
        if pair_id in seen:
            raise DuplicatePairId(row_no, pair_id)
        seen.add(pair_id)
        try:
            value = float(cells[1])
        except ValueError:
            raise MalformedRow(row_no, f"score {cells[1]!r} is not a number") from None
        rows.append((pair_id, value))
    return rows


def split_summary(splits: list[DatasetSplit]) -> list[tuple[str, str, int]]:
    """One (language, split, count) row per input split, in input order."""
    return [(str(s.language), s.split, len(s.pairs)) for s in splits]
