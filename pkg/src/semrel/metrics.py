"""Evaluation suite: rank correlations and binarized classification metrics.

Spearman is the Pearson correlation of average-tie ranks, the shared task's
headline metric; F1/accuracy/recall come from thresholding both gold and
predicted scores into related/unrelated labels.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInput, LengthMismatch

REPORT_VERSION = 1


def rank_average(values) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    a = np.asarray(values, dtype=np.float64)
    n = a.shape[0]
    order = np.argsort(a, kind="stable")
    ranks = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _check_paired(gold, pred) -> tuple[np.ndarray, np.ndarray]:
    g = np.asarray(gold, dtype=np.float64)
    p = np.asarray(pred, dtype=np.float64)
    if g.shape[0] != p.shape[0]:
        raise LengthMismatch(g.shape[0], p.shape[0])
    if g.shape[0] < 2:
        raise DegenerateInput("correlation needs at least 2 samples")
    return g, p


def pearson(gold, pred) -> float:
    """Product-moment correlation; constant input raises DegenerateInput."""
    g, p = _check_paired(gold, pred)
    g = g - g.mean()
    p = p - p.mean()
    denom = float(np.sqrt((g @ g) * (p @ p)))
    if denom == 0.0:
        raise DegenerateInput("correlation undefined for a constant vector")
    return min(1.0, max(-1.0, float(g @ p) / denom))


def spearman(gold, pred) -> float:
    """Pearson correlation of average-tie ranks.

    Reduces to 1 - 6*sum(d^2)/(n*(n^2-1)) when both vectors are tie-free.
    """
    g, p = _check_paired(gold, pred)
    return pearson(rank_average(g), rank_average(p))


class BinarizedMetrics(NamedTuple):
    f1: float
    accuracy: float
    recall: float


def binarized_metrics(gold, pred, threshold: float = 0.5) -> BinarizedMetrics:
    """Label both sides by value >= threshold (positive class = related).

    F1 is 0 when precision + recall is 0; recall is 0 when gold has no
    positives.
    """
    g = np.asarray(gold, dtype=np.float64)
    p = np.asarray(pred, dtype=np.float64)
    if g.shape[0] != p.shape[0]:
        raise LengthMismatch(g.shape[0], p.shape[0])
    if g.shape[0] < 1:
        raise DegenerateInput("binarized metrics need at least 1 sample")
    gl = g >= threshold
    pl = p >= threshold
    tp = int(np.sum(gl & pl))
    tn = int(np.sum(~gl & ~pl))
    fp = int(np.sum(~gl & pl))
    fn = int(np.sum(gl & ~pl))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (tp + tn) / g.shape[0]
    return BinarizedMetrics(f1=f1, accuracy=accuracy, recall=recall)


@dataclass(frozen=True)
class EvalReport:
    """One evaluated (track, language, model) cell."""

    language: str
    track: str
    model_name: str
    spearman: float
    pearson: float
    f1: float
    accuracy: float
    recall: float
    n: int
    threshold: float


def evaluate_scores(
    gold,
    pred,
    *,
    language: str,
    track: str,
    model_name: str,
    threshold: float = 0.5,
) -> EvalReport:
    g, p = _check_paired(gold, pred)
    binarized = binarized_metrics(g, p, threshold)
    return EvalReport(
        language=language,
        track=track,
        model_name=model_name,
        spearman=spearman(g, p),
        pearson=pearson(g, p),
        f1=binarized.f1,
        accuracy=binarized.accuracy,
        recall=binarized.recall,
        n=int(g.shape[0]),
        threshold=threshold,
    )


# ------------------------------------------------------------- rendering


TABLE_COLUMNS = ("Sr.No.", "Language", "Model", "F1", "Accuracy", "Recall", "Spearman")


def render_report(reports: list[EvalReport], format: str = "table") -> bytes:
    """Fixed-width text table (3-decimal display) or versioned JSON."""
    if format == "json":
        payload = {"version": REPORT_VERSION, "reports": [asdict(r) for r in reports]}
        return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format != "table":
        raise ValueError(f"unknown report format {format!r}")
    rows = [TABLE_COLUMNS]
    for i, r in enumerate(reports, start=1):
        rows.append(
            (
                str(i),
                r.language,
                r.model_name,
                f"{r.f1:.3f}",
                f"{r.accuracy:.3f}",
                f"{r.recall:.3f}",
                f"{r.spearman:.3f}",
            )
        )
    widths = [max(len(row[c]) for row in rows) for c in range(len(TABLE_COLUMNS))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return ("\n".join(lines) + "\n").encode("utf-8")


def reports_from_json(data: bytes) -> list[EvalReport]:
    payload = json.loads(data.decode("utf-8"))
    if payload.get("version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {payload.get('version')!r}")
    return [EvalReport(**record) for record in payload["reports"]]
