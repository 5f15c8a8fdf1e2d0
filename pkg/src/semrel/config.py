"""Experiment configuration: one TOML document per run, always persisted in
fully-resolved form so any run can be reproduced bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .heads import GbtParams, SvrParams
from .textprep import TokenizerConfig
from .tfidf import DEFAULT_PROJECTION_DIM, DEFAULT_PROJECTION_SEED

TRACKS = ("A", "B", "C")
HEAD_KINDS = ("svr", "gbt")


@dataclass
class DataConfig:
    train: str = ""
    eval: str = ""
    format: str = "auto"


@dataclass
class FeaturizerConfig:
    kind: str = "tfidf-pair"
    projection_dim: int = DEFAULT_PROJECTION_DIM
    projection_seed: int = DEFAULT_PROJECTION_SEED
    min_df: int = 1


@dataclass
class ProviderConfig:
    embedding: str = ""
    embedding_model: str = ""
    embedding_dimension: int = 0
    translation: str = ""
    translation_cache: str = ""
    source_language: str = ""
    target_language: str = ""


@dataclass
class ExperimentConfig:
    track: str
    language: str
    seed: int
    output_dir: str
    threshold: float = 0.5
    data: DataConfig = field(default_factory=DataConfig)
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    featurizer: FeaturizerConfig = field(default_factory=FeaturizerConfig)
    head_kind: str = "gbt"
    svr: SvrParams = field(default_factory=SvrParams)
    gbt: GbtParams = field(default_factory=GbtParams)
    provider: ProviderConfig = field(default_factory=ProviderConfig)

    def head_params(self) -> tuple[SvrParams, GbtParams]:
        """Head hyperparameters with the run seed threaded in."""
        svr = SvrParams(**{**self.svr.to_dict(), "seed": self.seed})
        gbt = GbtParams(**{**self.gbt.to_dict(), "seed": self.seed})
        return svr, gbt


def _take(section: dict, key: str, expected, default):
    value = section.pop(key, default)
    if value is None:
        return None
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
        raise ConfigError(f"config key {key!r} must be {expected.__name__}, got {value!r}")
    return value


def _no_leftovers(section: dict, where: str) -> None:
    if section:
        raise ConfigError(f"unknown config keys in {where}: {sorted(section)}")


def _copy_doc(obj):
    return {k: _copy_doc(v) for k, v in obj.items()} if isinstance(obj, dict) else obj


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a parsed TOML document; the seed must be explicit."""
    doc = _copy_doc(doc)

    track = _take(doc, "track", str, "A")
    if track not in TRACKS:
        raise ConfigError(f"track must be one of {TRACKS}, got {track!r}")
    language = _take(doc, "language", str, "eng")
    seed = _take(doc, "seed", int, None)
    if seed is None:
        raise ConfigError("config must set an explicit seed")
    output_dir = _take(doc, "output_dir", str, "runs/out")
    threshold = _take(doc, "threshold", float, 0.5)
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")

    data_sec = doc.pop("data", {})
    data = DataConfig(
        train=_take(data_sec, "train", str, ""),
        eval=_take(data_sec, "eval", str, ""),
        format=_take(data_sec, "format", str, "auto"),
    )
    if data.format not in ("auto", "text3", "cols4"):
        raise ConfigError(f"data.format must be auto|text3|cols4, got {data.format!r}")
    _no_leftovers(data_sec, "[data]")

    tok_sec = doc.pop("tokenizer", {})
    tokenizer = TokenizerConfig(
        lowercase=_take(tok_sec, "lowercase", bool, True),
        strip_punctuation=_take(tok_sec, "strip_punctuation", bool, True),
        ngram_min=_take(tok_sec, "ngram_min", int, 1),
        ngram_max=_take(tok_sec, "ngram_max", int, 1),
        unit=_take(tok_sec, "unit", str, "word"),
    )
    _no_leftovers(tok_sec, "[tokenizer]")

    feat_sec = doc.pop("featurizer", {})
    featurizer = FeaturizerConfig(
        kind=_take(feat_sec, "kind", str, "tfidf-pair"),
        projection_dim=_take(feat_sec, "projection_dim", int, DEFAULT_PROJECTION_DIM),
        projection_seed=_take(feat_sec, "projection_seed", int, DEFAULT_PROJECTION_SEED),
        min_df=_take(feat_sec, "min_df", int, 1),
    )
    if featurizer.kind not in ("tfidf-pair", "embedding-pair"):
        raise ConfigError(f"featurizer.kind must be tfidf-pair|embedding-pair, got {featurizer.kind!r}")
    _no_leftovers(feat_sec, "[featurizer]")

    head_sec = doc.pop("head", {})
    head_kind = _take(head_sec, "kind", str, "gbt")
    if head_kind not in HEAD_KINDS:
        raise ConfigError(f"head.kind must be one of {HEAD_KINDS}, got {head_kind!r}")
    svr_sec = head_sec.pop("svr", {})
    svr = SvrParams(
        epsilon=_take(svr_sec, "epsilon", float, 0.05),
        c=_take(svr_sec, "c", float, 1.0),
        epochs=_take(svr_sec, "epochs", int, 200),
        learning_rate=_take(svr_sec, "learning_rate", float, 0.5),
        seed=0,
    )
    _no_leftovers(svr_sec, "[head.svr]")
    gbt_sec = head_sec.pop("gbt", {})
    gbt = GbtParams(
        max_depth=_take(gbt_sec, "max_depth", int, 4),
        n_rounds=_take(gbt_sec, "n_rounds", int, 200),
        shrinkage=_take(gbt_sec, "shrinkage", float, 0.1),
        reg_lambda=_take(gbt_sec, "reg_lambda", float, 1.0),
        min_samples_leaf=_take(gbt_sec, "min_samples_leaf", int, 2),
        seed=0,
    )
    _no_leftovers(gbt_sec, "[head.gbt]")
    _no_leftovers(head_sec, "[head]")

    prov_sec = doc.pop("provider", {})
    provider = ProviderConfig(
        embedding=_take(prov_sec, "embedding", str, ""),
        embedding_model=_take(prov_sec, "embedding_model", str, ""),
        embedding_dimension=_take(prov_sec, "embedding_dimension", int, 0),
        translation=_take(prov_sec, "translation", str, ""),
        translation_cache=_take(prov_sec, "translation_cache", str, ""),
        source_language=_take(prov_sec, "source_language", str, ""),
        target_language=_take(prov_sec, "target_language", str, ""),
    )
    _no_leftovers(prov_sec, "[provider]")

    _no_leftovers(doc, "config")
    return ExperimentConfig(
        track=track,
        language=language,
        seed=seed,
        output_dir=output_dir,
        threshold=threshold,
        data=data,
        tokenizer=tokenizer,
        featurizer=featurizer,
        head_kind=head_kind,
        svr=svr,
        gbt=gbt,
        provider=provider,
    )


def load_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    """Read a TOML config file and apply flat CLI overrides on top.

    Override keys are dotted paths such as ``data.train`` or ``head.kind``.
    """
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section = doc
        parts = dotted.split(".")
        for part in parts[:-1]:
            section = section.setdefault(part, {})
        section[parts[-1]] = value
    return parse_config(doc)


def config_to_doc(config: ExperimentConfig) -> dict:
    """The fully-resolved document, sufficient to reproduce the run."""
    return {
        "track": config.track,
        "language": config.language,
        "seed": config.seed,
        "output_dir": config.output_dir,
        "threshold": config.threshold,
        "data": {"train": config.data.train, "eval": config.data.eval, "format": config.data.format},
        "tokenizer": config.tokenizer.to_dict(),
        "featurizer": {
            "kind": config.featurizer.kind,
            "projection_dim": config.featurizer.projection_dim,
            "projection_seed": config.featurizer.projection_seed,
            "min_df": config.featurizer.min_df,
        },
        "head": {
            "kind": config.head_kind,
            "svr": {k: v for k, v in config.svr.to_dict().items() if k != "seed"},
            "gbt": {k: v for k, v in config.gbt.to_dict().items() if k != "seed"},
        },
        "provider": {
            "embedding": config.provider.embedding,
            "embedding_model": config.provider.embedding_model,
            "embedding_dimension": config.provider.embedding_dimension,
            "translation": config.provider.translation,
            "translation_cache": config.provider.translation_cache,
            "source_language": config.provider.source_language,
            "target_language": config.provider.target_language,
        },
    }


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=True)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot render config value {value!r}")


def dumps_toml(doc: dict) -> str:
    """Minimal TOML emitter for the restricted config schema (scalars, lists,
    and up to two levels of tables)."""
    lines: list[str] = []

    def emit(table: dict, prefix: str) -> None:
        nested = []
        for key, value in table.items():
            if isinstance(value, dict):
                nested.append((key, value))
            else:
                lines.append(f"{key} = {_toml_value(value)}")
        for key, value in nested:
            name = f"{prefix}{key}"
            lines.append("")
            lines.append(f"[{name}]")
            emit(value, name + ".")

    emit(doc, "")
    return "\n".join(lines).lstrip("\n") + "\n"


def dump_config(config: ExperimentConfig) -> str:
    return dumps_toml(config_to_doc(config))
