"""Bridge configuration: stub mode needs nothing beyond a dimension; real
mode declares encoder specs that are loaded lazily on first request."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

MODES = ("stub", "real")


@dataclass(frozen=True)
class EncoderSpec:
    source: str  # model id handed to the encoder backend
    dimension: int


@dataclass
class BridgeConfig:
    mode: str = "stub"
    host: str = "127.0.0.1"
    port: int = 8100
    stub_dimension: int = 16
    stub_model: str = "stub"
    # "<source>-<target>" -> token translation table
    translation_tables: dict[str, dict[str, str]] = field(default_factory=dict)
    models: dict[str, EncoderSpec] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.stub_dimension < 1:
            raise ValueError("stub_dimension must be >= 1")

    def table_for(self, source: str, target: str) -> dict[str, str] | None:
        return self.translation_tables.get(f"{source}-{target}")


def load_config(path: str | Path) -> BridgeConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    translation = {
        pair: {str(k): str(v) for k, v in table.items()}
        for pair, table in doc.get("translation", {}).items()
    }
    models = {
        name: EncoderSpec(source=str(spec["source"]), dimension=int(spec["dimension"]))
        for name, spec in doc.get("models", {}).items()
    }
    return BridgeConfig(
        mode=doc.get("mode", "stub"),
        host=doc.get("host", "127.0.0.1"),
        port=int(doc.get("port", 8100)),
        stub_dimension=int(doc.get("stub_dimension", 16)),
        stub_model=doc.get("stub_model", "stub"),
        translation_tables=translation,
        models=models,
    )
