"""Command-line orchestration: train / score / eval / xlingual / cache / report.

Exit codes are a stable contract: 0 success, 2 config or IO problems,
3 provider failures, 4 data mismatches. Failures emit one machine-readable
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus, crosslingual, embeddings, heads, metrics, pipeline, tfidf
from .config import ExperimentConfig, dump_config, load_config
from .corpus import DatasetSplit, LanguageCode, parse_semrel_csv
from .errors import ConfigError, EvalUnlabeled, SemrelError, UnmatchedPairIds

EXIT_CODES = {"config": 2, "io": 2, "provider": 3, "data": 4}

PROVIDER_URL_ENV = "SEMREL_PROVIDER_URL"


def _fail_json(kind: str, exc: Exception) -> None:
    payload = {
        "error": {
            "kind": kind,
            "type": type(exc).__name__,
            "message": str(exc),
        }
    }
    if isinstance(exc, SemrelError):
        details = exc.details()
        if details:
            payload["error"]["details"] = details
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)


def _read_split(path: str, language: str, split: str, form: str) -> DatasetSplit:
    data = Path(path).read_bytes()
    return parse_semrel_csv(data, LanguageCode(language), split, form)


def _embedding_provider(cfg: ExperimentConfig) -> embeddings.EmbeddingProvider:
    spec = cfg.provider.embedding or os.environ.get(PROVIDER_URL_ENV, "")
    if not spec:
        raise ConfigError(
            f"no embedding provider configured (set provider.embedding or {PROVIDER_URL_ENV})"
        )
    return embeddings.make_embedding_provider(
        spec,
        cfg.provider.embedding_model or None,
        cfg.provider.embedding_dimension or None,
    )


def _build_featurizer(cfg: ExperimentConfig) -> pipeline.PairFeaturizer:
    if cfg.featurizer.kind == "tfidf-pair":
        return pipeline.TfidfPairFeaturizer(
            tokenizer=cfg.tokenizer,
            projection=tfidf.HashProjection(cfg.featurizer.projection_dim, cfg.featurizer.projection_seed),
            min_df=cfg.featurizer.min_df,
        )
    provider = _embedding_provider(cfg)
    spec = cfg.provider.embedding or os.environ.get(PROVIDER_URL_ENV, "")
    return pipeline.EmbeddingPairFeaturizer(provider, spec=spec)


def _write_run_artifacts(
    out_dir: Path,
    cfg: ExperimentConfig,
    featurizer: pipeline.PairFeaturizer,
    model,
    report: heads.TrainReport,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "model.json").write_bytes(heads.save(model))
    (out_dir / "featurizer.json").write_bytes(pipeline.featurizer_to_json(featurizer))
    train_report = {
        "losses": report.losses,
        "final_loss": report.final_loss,
        "seconds": report.seconds,
        "degenerate": report.degenerate,
    }
    (out_dir / "train_report.json").write_text(json.dumps(train_report, indent=2) + "\n", encoding="utf-8")
    (out_dir / "config.resolved.toml").write_text(dump_config(cfg), encoding="utf-8")


def _translation_provider(cfg: ExperimentConfig) -> crosslingual.TranslationProvider:
    spec = cfg.provider.translation
    if not spec:
        raise ConfigError("no translation provider configured (set provider.translation)")
    source = LanguageCode(cfg.provider.source_language or cfg.language)
    target = LanguageCode(cfg.provider.target_language or cfg.language)
    if spec.startswith("table:"):
        return crosslingual.TableTranslationProvider.from_file(spec[len("table:") :], source, target)
    if spec.startswith(("http://", "https://")):
        return crosslingual.HttpTranslationProvider(spec, source, target)
    raise ConfigError(f"unrecognized translation provider spec {spec!r}")


# ---------------------------------------------------------------- commands


def cmd_train(args) -> int:
    cfg = load_config(args.config, _config_overrides(args))
    if not cfg.data.train:
        raise ConfigError("config has no data.train path")
    train = _read_split(cfg.data.train, cfg.language, "train", cfg.data.format)
    featurizer = _build_featurizer(cfg)
    svr_params, gbt_params = cfg.head_params()
    model, report = pipeline.train_supervised(train, featurizer, cfg.head_kind, svr_params, gbt_params)
    _write_run_artifacts(Path(cfg.output_dir), cfg, featurizer, model, report)
    print(f"trained {cfg.head_kind} on {len(train)} pairs; final training MSE {report.final_loss:.6f}")
    return 0


def cmd_score(args) -> int:
    cfg = load_config(args.config, _config_overrides(args))
    data_path = args.data or cfg.data.eval
    if not data_path:
        raise ConfigError("no evaluation data given (use --data or config data.eval)")
    split = _read_split(data_path, cfg.language, args.split, cfg.data.format)
    out_path = Path(args.out) if args.out else Path(cfg.output_dir) / "predictions.csv"

    if cfg.track == "B":
        provider = _embedding_provider(cfg)
        scores = embeddings.score_pairs_unsupervised(provider, split).bounded
    else:
        model_dir = Path(args.model_dir) if args.model_dir else Path(cfg.output_dir)
        featurizer = pipeline.featurizer_from_json((model_dir / "featurizer.json").read_bytes())
        model = heads.load((model_dir / "model.json").read_bytes())
        scores = pipeline.predict_split(featurizer, model, split)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes(corpus.write_predictions(split, scores))
    print(f"wrote {len(scores)} predictions to {out_path}")
    return 0


def cmd_eval(args) -> int:
    if not 0.0 < args.threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {args.threshold}")
    gold_split = _read_split(args.gold, args.language, args.split, args.format)
    if not gold_split.labeled:
        raise EvalUnlabeled()
    predictions = corpus.read_predictions(Path(args.pred).read_bytes())

    gold_ids = [p.pair_id for p in gold_split.pairs]
    pred_map = dict(predictions)
    gold_only = [i for i in gold_ids if i not in pred_map]
    pred_only = [i for i, _ in predictions if i not in set(gold_ids)]
    if gold_only or pred_only:
        raise UnmatchedPairIds(gold_only, pred_only)

    report = metrics.evaluate_scores(
        gold_split.scores(),
        [pred_map[i] for i in gold_ids],
        language=args.language,
        track=args.track,
        model_name=args.model_name,
        threshold=args.threshold,
    )
    sys.stdout.write(metrics.render_report([report], "table").decode("utf-8"))
    out = Path(args.out) if args.out else Path(args.pred).with_suffix(".report.json")
    out.write_bytes(metrics.render_report([report], "json"))
    print(f"report written to {out}")
    return 0


def cmd_xlingual(args) -> int:
    cfg = load_config(args.config, _config_overrides(args))
    if not cfg.data.train or not cfg.data.eval:
        raise ConfigError("xlingual needs both data.train and data.eval")
    source_lang = cfg.provider.source_language or cfg.language
    train = _read_split(cfg.data.train, source_lang, "train", cfg.data.format)
    eval_lang = cfg.provider.target_language or cfg.language
    eval_split = _read_split(cfg.data.eval, eval_lang, "dev", cfg.data.format)

    provider = _translation_provider(cfg)
    cache = None
    if cfg.provider.translation_cache:
        cache = crosslingual.TranslationCache.load(cfg.provider.translation_cache)
    featurizer = _build_featurizer(cfg)
    svr_params, gbt_params = cfg.head_params()
    result = crosslingual.run_track_c(
        train,
        eval_split,
        provider,
        featurizer,
        cfg.head_kind,
        svr_params,
        gbt_params,
        cache=cache,
        want_report=eval_split.labeled,
        threshold=cfg.threshold,
        model_name=f"{cfg.featurizer.kind}+{cfg.head_kind}",
    )

    out_dir = Path(cfg.output_dir)
    _write_run_artifacts(out_dir, cfg, featurizer, result.model, result.train_report)
    (out_dir / "translated_train.csv").write_bytes(corpus.write_split_csv(result.translated.translated))
    (out_dir / "predictions.csv").write_bytes(corpus.write_predictions(eval_split, result.predictions))
    if result.report is not None:
        (out_dir / "report.json").write_bytes(metrics.render_report([result.report], "json"))
        sys.stdout.write(metrics.render_report([result.report], "table").decode("utf-8"))
    else:
        print("evaluation split is unlabeled; predictions written, no report")
    if cache is not None and cfg.provider.translation_cache:
        cache.save(cfg.provider.translation_cache)
    return 0


def cmd_cache_export(args) -> int:
    split = _read_split(args.data, args.language, args.split, args.format)
    url = args.provider or os.environ.get(PROVIDER_URL_ENV, "")
    if not url:
        raise ConfigError(f"cache export needs --provider or {PROVIDER_URL_ENV}")
    provider = embeddings.make_embedding_provider(url, args.model, args.dimension)
    unique: list[str] = []
    seen: set[str] = set()
    for pair in split.pairs:
        for text in (pair.sentence1, pair.sentence2):
            if text not in seen:
                seen.add(text)
                unique.append(text)
    vectors = provider.embed_batch(unique)
    records = [
        (embeddings.text_key(text), provider.model_name, [float(v) for v in vec])
        for text, vec in zip(unique, vectors)
    ]
    embeddings.write_cache_file(args.out, records)
    print(f"exported {len(records)} embeddings to {args.out}")
    return 0


def cmd_cache_import(args) -> int:
    merged: dict[tuple[str, str], list[float]] = {}
    for path in args.inputs:
        for key, model, vector in embeddings.read_cache_file(path):
            existing = merged.get((model, key))
            if existing is not None and existing != vector:
                raise ConfigError(f"conflicting vectors for key {key[:12]}… (model {model!r})")
            merged[(model, key)] = vector
    records = [(key, model, vector) for (model, key), vector in sorted(merged.items())]
    embeddings.write_cache_file(args.out, records)
    print(f"merged {len(records)} records into {args.out}")
    return 0


def cmd_report(args) -> int:
    reports = metrics.reports_from_json(Path(args.input).read_bytes())
    sys.stdout.write(metrics.render_report(reports, args.format).decode("utf-8"))
    return 0


# ------------------------------------------------------------------ parser


def _config_overrides(args) -> dict:
    overrides = {
        "seed": getattr(args, "seed", None),
        "output_dir": getattr(args, "out_dir", None),
        "track": getattr(args, "track", None),
        "language": getattr(args, "language", None),
        "threshold": getattr(args, "threshold", None),
        "data.train": getattr(args, "train", None),
        "data.eval": getattr(args, "eval", None),
        "data.format": getattr(args, "format", None),
        "head.kind": getattr(args, "head", None),
        "featurizer.kind": getattr(args, "featurizer", None),
        "provider.translation": getattr(args, "translator", None),
        "provider.embedding": getattr(args, "provider", None),
    }
    return {k: v for k, v in overrides.items() if v is not None}


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="TOML experiment config")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out-dir", help="override output_dir")
    p.add_argument("--track", choices=["A", "B", "C"], help="override track")
    p.add_argument("--language", help="override language tag")
    p.add_argument("--threshold", type=float, help="override binarization threshold")
    p.add_argument("--train", help="override data.train path")
    p.add_argument("--eval", help="override data.eval path")
    p.add_argument("--format", choices=["auto", "text3", "cols4"], help="override data.format")
    p.add_argument("--head", choices=["svr", "gbt"], help="override head.kind")
    p.add_argument("--featurizer", choices=["tfidf-pair", "embedding-pair"], help="override featurizer.kind")
    p.add_argument("--translator", help="override provider.translation (table:<file> or http(s) URL)")
    p.add_argument("--provider", help="override provider.embedding (file:<path> or http(s) URL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semrel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit featurizer + regression head on a labeled split")
    _add_config_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="write a prediction CSV for a data file")
    _add_config_options(p)
    p.add_argument("--data", help="data file to score (defaults to config data.eval)")
    p.add_argument("--split", default="dev", choices=["train", "dev", "test"])
    p.add_argument("--model-dir", help="directory with model.json/featurizer.json (defaults to output_dir)")
    p.add_argument("--out", help="prediction CSV path (defaults to output_dir/predictions.csv)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="score a prediction file against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--language", default="eng")
    p.add_argument("--split", default="dev", choices=["train", "dev", "test"])
    p.add_argument("--format", default="auto", choices=["auto", "text3", "cols4"])
    p.add_argument("--track", default="A", choices=["A", "B", "C"])
    p.add_argument("--model-name", default="predictions")
    p.add_argument("--out", help="report JSON path (defaults next to --pred)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("xlingual", help="translate-then-train cross-lingual run")
    _add_config_options(p)
    p.set_defaults(func=cmd_xlingual)

    p = sub.add_parser("cache", help="embedding cache utilities")
    cache_sub = p.add_subparsers(dest="cache_command", required=True)
    pe = cache_sub.add_parser("export", help="embed a dataset through a provider into a cache file")
    pe.add_argument("--data", required=True)
    pe.add_argument("--language", default="eng")
    pe.add_argument("--split", default="dev", choices=["train", "dev", "test"])
    pe.add_argument("--format", default="auto", choices=["auto", "text3", "cols4"])
    pe.add_argument("--provider", help="provider spec (defaults to SEMREL_PROVIDER_URL)")
    pe.add_argument("--model", required=True)
    pe.add_argument("--dimension", type=int)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_cache_export)
    pi = cache_sub.add_parser("import", help="merge cache files, erroring on conflicts")
    pi.add_argument("--in", dest="inputs", action="append", required=True)
    pi.add_argument("--out", required=True)
    pi.set_defaults(func=cmd_cache_import)

    p = sub.add_parser("report", help="render a report JSON file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", default="table", choices=["table", "json"])
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SemrelError as exc:
        _fail_json(exc.kind, exc)
        return EXIT_CODES.get(exc.kind, 1)
    except OSError as exc:
        _fail_json("io", exc)
        return EXIT_CODES["io"]


if __name__ == "__main__":
    sys.exit(main())
