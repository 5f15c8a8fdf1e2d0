"""FastAPI application exposing the embed/translate/health wire protocol.

Stub mode serves a single deterministic model and dictionary-table
translations with zero ML dependencies; real mode wraps pretrained sentence
encoders behind the same endpoints.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import BridgeConfig
from .encoders import EncoderRegistry, ModelLoadFailed, ModelStillLoading
from .stub import apply_table, stub_vector


class EmbedRequest(BaseModel):
    model: str
    texts: list[str]


class TranslateRequest(BaseModel):
    texts: list[str]
    source: str
    target: str


def create_app(config: BridgeConfig) -> FastAPI:
    app = FastAPI(title="semrel-bridge")
    registry = EncoderRegistry(config.models) if config.mode == "real" else None

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        # The wire protocol promises 400, not FastAPI's default 422.
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        if not request.texts:
            raise HTTPException(status_code=400, detail="texts must be non-empty")
        if config.mode == "stub":
            if request.model != config.stub_model:
                raise HTTPException(status_code=404, detail=f"unknown model {request.model!r}")
            dimension = config.stub_dimension
            vectors = [stub_vector(text, dimension) for text in request.texts]
        else:
            if not registry.known(request.model):
                raise HTTPException(status_code=404, detail=f"unknown model {request.model!r}")
            dimension = registry.dimension(request.model)
            try:
                vectors = registry.encode(request.model, request.texts)
            except ModelStillLoading:
                raise HTTPException(status_code=503, detail=f"model {request.model!r} is loading") from None
            except ModelLoadFailed as exc:
                raise HTTPException(status_code=503, detail=str(exc)) from None
        return {"model": request.model, "dimension": dimension, "vectors": vectors}

    @app.post("/v1/translate")
    def translate(request: TranslateRequest):
        if not request.texts:
            raise HTTPException(status_code=400, detail="texts must be non-empty")
        table = config.table_for(request.source, request.target)
        if table is None:
            raise HTTPException(
                status_code=400,
                detail=f"unsupported language pair {request.source}->{request.target}",
            )
        if config.mode == "stub":
            return {"translations": [apply_table(text, table) for text in request.texts]}
        # Real mode delegates to a configured backend; the table doubles as
        # that backend until one is wired in, mirroring stub behavior.
        try:
            return {"translations": [apply_table(text, table) for text in request.texts]}
        except Exception as exc:  # pragma: no cover - backend failure path
            raise HTTPException(status_code=502, detail=str(exc)) from None

    @app.get("/v1/health")
    def health():
        if config.mode == "stub":
            models = [{"name": config.stub_model, "dimension": config.stub_dimension, "pooling": "sha256-stub"}]
            return {"status": "ok", "mode": "stub", "models": models}
        loading = registry.loading()
        if loading:
            raise HTTPException(status_code=503, detail=f"models loading: {loading}")
        models = [
            {"name": name, "dimension": registry.dimension(name), "pooling": "mean+l2"}
            for name in registry.ready()
        ]
        return {"status": "ok", "mode": "real", "models": models}

    return app
