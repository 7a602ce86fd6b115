"""HTTP facade over the session store.

All domain validation lives in the core modules; this layer maps uploads and
JSON bodies onto store calls and folds every rejection into one error shape:
400 with {"violations": [{rule, message, ...}]}, 404 for unknown ids.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .errors import MediaFormatError, UnknownSessionError, ValidationFailure
from .store import SessionStore

MEDIA_FILES = {"audio": ("audio.wav", "audio/wav"),
               "video": ("video.y4m", "video/x-yuv4mpeg")}


class RecipeBody(BaseModel):
    """Recipe envelope; op contents are validated by the recipe parser."""

    model_config = ConfigDict(extra="allow")
    ops: list[dict] = Field(default_factory=list)


class DefenseBody(BaseModel):
    model_config = ConfigDict(extra="allow")
    audio_denoise: dict | None = None
    video_mci: dict | None = None
    feature_interp: dict | None = None


def create_app(data_dir: str | Path, **store_kwargs) -> FastAPI:
    app = FastAPI(title="multimodal robustness workbench")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    store = SessionStore(data_dir, **store_kwargs)
    app.state.store = store

    @app.exception_handler(ValidationFailure)
    async def _validation_failure(request: Request, exc: ValidationFailure):
        return JSONResponse(status_code=400,
                            content={"violations": [v.to_dict() for v in exc.violations]})

    @app.exception_handler(MediaFormatError)
    async def _media_error(request: Request, exc: MediaFormatError):
        return JSONResponse(status_code=400,
                            content={"violations": [{"rule": "media",
                                                     "message": str(exc)}]})

    @app.exception_handler(UnknownSessionError)
    async def _unknown_session(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404,
                            content={"detail": f"unknown session {exc.session_id}"})

    @app.exception_handler(RequestValidationError)
    async def _request_invalid(request: Request, exc: RequestValidationError):
        violations = [{"rule": "body",
                       "message": f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"}
                      for err in exc.errors()]
        return JSONResponse(status_code=400, content={"violations": violations})

    @app.post("/api/sessions", status_code=201)
    async def create_session(audio: UploadFile, video: UploadFile,
                             transcript: UploadFile):
        with tempfile.TemporaryDirectory(prefix="workbench-upload-") as tmp:
            tmp_path = Path(tmp)
            paths = {}
            for name, upload in (("audio", audio), ("video", video),
                                 ("transcript", transcript)):
                suffix = Path(upload.filename or "").suffix or \
                    {"audio": ".wav", "video": ".y4m", "transcript": ".json"}[name]
                paths[name] = tmp_path / f"{name}{suffix}"
                with paths[name].open("wb") as fh:
                    shutil.copyfileobj(upload.file, fh)
            session = store.create_session(paths["audio"], paths["video"],
                                           paths["transcript"])
        return {"id": session.id}

    @app.get("/api/sessions")
    async def list_sessions():
        return store.list_sessions()

    @app.get("/api/noise-profiles")
    async def noise_profiles():
        return store.list_profiles()

    @app.put("/api/sessions/{session_id}/recipe")
    async def put_recipe(session_id: str, body: RecipeBody):
        store.apply_recipe(session_id, body.model_dump())
        return store.comparison(session_id)

    @app.put("/api/sessions/{session_id}/defense")
    async def put_defense(session_id: str, body: DefenseBody):
        store.apply_defense(session_id,
                            {k: v for k, v in body.model_dump().items() if v is not None})
        return store.comparison(session_id)

    @app.get("/api/sessions/{session_id}/comparison")
    async def get_comparison(session_id: str):
        return store.comparison(session_id)

    @app.get("/api/sessions/{session_id}/media/{variant}/{modality}")
    async def get_media(session_id: str, variant: str, modality: str):
        session = store.get(session_id)
        if variant not in session.variants or modality not in MEDIA_FILES:
            return JSONResponse(status_code=404,
                                content={"detail": f"no {modality} media for "
                                                   f"variant {variant!r}"})
        filename, media_type = MEDIA_FILES[modality]
        payload = (session.directory / variant / filename).read_bytes()
        return Response(content=payload, media_type=media_type)

    @app.get("/api/sessions/{session_id}/export")
    async def export_session(session_id: str):
        payload = store.export_session(session_id)
        return Response(content=payload, media_type="application/zip",
                        headers={"Content-Disposition":
                                 f'attachment; filename="{session_id}.zip"'})

    @app.delete("/api/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        store.delete_session(session_id)
        return Response(status_code=204)

    return app
