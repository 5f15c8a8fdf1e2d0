"""Exception hierarchy for the toolkit.

Every error carries a ``kind`` that the CLI maps onto its exit-code
contract: config/io -> 2, provider -> 3, data -> 4.
"""

from __future__ import annotations


class SemrelError(Exception):
    """Base class for all toolkit errors."""

    kind = "data"

    def details(self) -> dict:
        """Structured payload for the CLI's machine-readable error JSON."""
        return {}


class ConfigError(SemrelError):
    kind = "config"


# ---------------------------------------------------------------- corpus


class MalformedRow(SemrelError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row

    def details(self) -> dict:
        return {"row": self.row}


class ScoreOutOfRange(SemrelError):
    def __init__(self, row: int, value: float):
        super().__init__(f"row {row}: score {value!r} outside [0, 1]")
        self.row = row
        self.value = value

    def details(self) -> dict:
        return {"row": self.row, "value": self.value}


class DuplicatePairId(SemrelError):
    def __init__(self, row: int, pair_id: str):
        super().__init__(f"row {row}: duplicate pair id {pair_id!r}")
        self.row = row
        self.pair_id = pair_id

    def details(self) -> dict:
        return {"row": self.row, "pair_id": self.pair_id}


class EmptySentence(SemrelError):
    def __init__(self, row: int, which: str):
        super().__init__(f"row {row}: {which} is empty after trimming")
        self.row = row

    def details(self) -> dict:
        return {"row": self.row}


class LengthMismatch(SemrelError):
    def __init__(self, expected: int, got: int, what: str = "values"):
        super().__init__(f"expected {expected} {what}, got {got}")
        self.expected = expected
        self.got = got


# ------------------------------------------------------- tfidf / heads


class EmptyCorpus(SemrelError):
    def __init__(self):
        super().__init__("cannot fit on an empty corpus")


class DimensionMismatch(SemrelError):
    pass


class VersionMismatch(SemrelError):
    def __init__(self, expected: int, got):
        super().__init__(f"unsupported version {got!r}, expected {expected}")
        self.expected = expected
        self.got = got


class CorruptModel(SemrelError):
    pass


# ----------------------------------------------------------- providers


class MissingEmbedding(SemrelError):
    kind = "provider"

    def __init__(self, index: int):
        super().__init__(f"no cached embedding for text at index {index}")
        self.index = index

    def details(self) -> dict:
        return {"index": self.index}


class ProviderUnreachable(SemrelError):
    kind = "provider"


class DimensionViolation(SemrelError):
    kind = "provider"

    def __init__(self, expected: int, got: int):
        super().__init__(f"provider returned {got}-dimensional vector, expected {expected}")
        self.expected = expected
        self.got = got


class ProtocolError(SemrelError):
    kind = "provider"


class TranslationMissing(SemrelError):
    kind = "provider"

    def __init__(self, text_hash: str, pair_id: str | None = None):
        where = f" (pair {pair_id})" if pair_id else ""
        super().__init__(f"no translation for source text {text_hash[:12]}…{where}")
        self.text_hash = text_hash
        self.pair_id = pair_id

    def details(self) -> dict:
        return {"text_hash": self.text_hash, "pair_id": self.pair_id}


class LanguageMismatch(ConfigError):
    pass


class EvalUnlabeled(SemrelError):
    def __init__(self):
        super().__init__("evaluation split has no gold scores but a report was requested")


# -------------------------------------------------------------- metrics


class DegenerateInput(SemrelError):
    pass


class UnmatchedPairIds(SemrelError):
    def __init__(self, gold_only: list[str], pred_only: list[str]):
        super().__init__(
            "pair ids do not line up: "
            f"{len(gold_only)} only in gold, {len(pred_only)} only in predictions"
        )
        self.gold_only = gold_only
        self.pred_only = pred_only

    def details(self) -> dict:
        return {"gold_only": self.gold_only, "pred_only": self.pred_only}
