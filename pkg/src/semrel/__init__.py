"""Multilingual semantic textual relatedness toolkit.

Three ways to score how related two sentences are, each in [0, 1]:
supervised regression over TF-IDF pair features, unsupervised
embedding-cosine scoring, and translate-then-train cross-lingual transfer,
plus a SemRel-format evaluation harness (Spearman/Pearson and binarized
F1/accuracy/recall).
"""

__version__ = "0.1.0"

from .corpus import DatasetSplit, LanguageCode, SentencePair, parse_semrel_csv
from .embeddings import cosine, score_pairs_unsupervised
from .metrics import EvalReport, binarized_metrics, evaluate_scores, pearson, spearman
from .textprep import TokenizerConfig, normalize, tokenize

__all__ = [
    "__version__",
    "DatasetSplit",
    "LanguageCode",
    "SentencePair",
    "parse_semrel_csv",
    "cosine",
    "score_pairs_unsupervised",
    "EvalReport",
    "binarized_metrics",
    "evaluate_scores",
    "pearson",
    "spearman",
    "TokenizerConfig",
    "normalize",
    "tokenize",
]
