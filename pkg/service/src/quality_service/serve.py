"""HTTP scoring service.

POST /score {"texts": [...]} -> {"scores": [...], "labels": [...]}, order
preserving; texts are truncated server-side to the model's character cap.
GET /health reports the loaded model version.  Malformed bodies get HTTP
400, oversized batches HTTP 413.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .model import ScoringBundle
from .thresholds import Thresholds, apply_thresholds

DEFAULT_MAX_BATCH = 256


def create_app(artifacts_dir: str | Path, max_batch: int = DEFAULT_MAX_BATCH) -> FastAPI:
    bundle = ScoringBundle.load(artifacts_dir)
    thresholds = Thresholds.load(Path(artifacts_dir) / "thresholds.json")
    app = FastAPI(title="quality-service", version=bundle.version)

    def bad_request(detail: str) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": detail})

    @app.post("/score")
    async def score(request: Request):
        try:
            body = await request.json()
        except Exception:
            return bad_request("body must be JSON")
        if not isinstance(body, dict) or "texts" not in body:
            return bad_request("missing 'texts' key")
        texts = body["texts"]
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return bad_request("'texts' must be a list of strings")
        if len(texts) > max_batch:
            return JSONResponse(status_code=413,
                                content={"error": f"batch exceeds {max_batch} texts"})
        truncated = [t[:bundle.config.truncate_chars] for t in texts]
        scores = bundle.score(truncated)
        labels = [apply_thresholds(s, thresholds) for s in scores]
        return {"scores": scores, "labels": labels}

    @app.get("/health")
    async def health():
        return {"status": "ok", "model_version": bundle.version}

    return app


def run(artifacts_dir: str | Path, host: str = "127.0.0.1", port: int = 8400,
        max_batch: int = DEFAULT_MAX_BATCH) -> None:
    import uvicorn

    uvicorn.run(create_app(artifacts_dir, max_batch), host=host, port=port)
