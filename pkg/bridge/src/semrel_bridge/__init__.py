"""HTTP bridge serving sentence embeddings and translations to the semrel
toolkit, with a deterministic stub mode that needs no ML dependencies."""

__version__ = "0.1.0"

from .app import create_app
from .config import BridgeConfig, load_config
from .stub import apply_table, stub_vector

__all__ = ["__version__", "create_app", "BridgeConfig", "load_config", "apply_table", "stub_vector"]
