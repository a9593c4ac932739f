"""HTTP embedding service.

POST /embed  {"phrases": [str, ...], "model_id": str}
          -> {"dimension": int, "results": [{"phrase", "tokens", "vectors"}]}
GET  /health -> 200 {"status": "ready", "model_id", "dimension", "models"}
                once ready, 503 while loading.

Responses are deterministic per (model_id, phrase); vectors are
L2-normalized server-side. Errors: unknown model_id 404, oversize batch
413, malformed request 400.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .encoders import (DEFAULT_MODEL_ID, EncoderRegistry, EncoderError,
                       UnknownModelError)


class EmbedRequest(BaseModel):
    phrases: list[str] = Field(min_length=1)
    model_id: str = DEFAULT_MODEL_ID


def create_app(registry: EncoderRegistry | None = None,
               default_model: str = DEFAULT_MODEL_ID,
               max_batch: int = 256) -> FastAPI:
    registry = registry or EncoderRegistry()
    state = {"ready": False}
    lock = threading.Lock()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        registry.get(default_model)  # fail fast if the default cannot load
        state["ready"] = True
        yield
        state["ready"] = False

    app = FastAPI(title="keyscore embedding provider", lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    def health():
        if not state["ready"]:
            raise HTTPException(status_code=503, detail="model loading")
        info = registry.get(default_model).info()
        return {
            "status": "ready",
            "model_id": info.model_id,
            "dimension": info.dimension,
            "models": {mid: {"dimension": registry.get(mid).info().dimension,
                             "rescale_baseline":
                                 registry.get(mid).info().rescale_baseline}
                       for mid in registry.model_ids()},
        }

    @app.post("/embed")
    def embed(request: EmbedRequest):
        if len(request.phrases) > max_batch:
            raise HTTPException(status_code=413,
                                detail=f"batch exceeds limit of {max_batch}")
        if any(not p.strip() for p in request.phrases):
            raise HTTPException(status_code=400, detail="empty phrase in batch")
        try:
            encoder = registry.get(request.model_id)
        except UnknownModelError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        results = []
        with lock:  # inference serialized; hash encoders are cheap anyway
            for phrase in request.phrases:
                try:
                    tokens, vectors = encoder.encode(phrase)
                except EncoderError as exc:
                    raise HTTPException(status_code=400, detail=str(exc))
                results.append({"phrase": phrase, "tokens": tokens,
                                "vectors": vectors.tolist()})
        return {"dimension": encoder.dimension, "results": results}

    return app
