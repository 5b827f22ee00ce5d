"""Text-embedding server speaking the engine's sidecar wire protocol:

POST /embed/text  {"texts": [...]}  ->  {"dim": D, "vectors": [[...], ...]}

Stateless; every response vector is unit-normalized at the model's
dimension.
"""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel

from .models import get_model


class EmbedTextRequest(BaseModel):
    texts: list[str]


def create_app(model_name: str = "pixel-grid", dim: int = 512) -> FastAPI:
    model = get_model(model_name)
    app = FastAPI(title="scenedeck-sidecar", docs_url=None, redoc_url=None)

    @app.get("/health")
    async def health():
        return {"status": "ok", "model": model.name, "dim": dim}

    @app.post("/embed/text")
    async def embed_text(request: EmbedTextRequest):
        vectors = model.embed_texts(request.texts, dim)
        return {"dim": dim, "vectors": [row.tolist() for row in vectors]}

    return app
