"""HTTP surface for the pipeline: jobs, tracks, questions, analytics.

Generation is asynchronous (submit a job, poll its status); VQA answers
synchronously. Per-video stages run in a small worker pool; tests can run
jobs inline via ``ServerConfig.synchronous_jobs``.
"""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import pipeline, vqa
from .customization import CustomizationSettings, DEFAULT_SETTINGS, validate as validate_settings
from .errors import (
    EmptyQuestion,
    PipelineError,
    ProviderError,
    SchemaViolation,
    SettingsError,
)
from .gateway import provider_from_config
from .ingest import VideoRef
from .store import (
    DEFAULT_SETTINGS_MARKER,
    SessionStore,
    customization_distribution,
    length_trend,
    question_distribution,
)
from .track import track_to_dict

JOB_STATES = ("queued", "ingesting", "timing", "generating", "ready", "failed")
_STATE_ORDER = {state: i for i, state in enumerate(JOB_STATES)}


@dataclass
class ServerConfig:
    pipeline: pipeline.PipelineConfig = field(default_factory=pipeline.PipelineConfig)
    vqa: vqa.VQAConfig = field(default_factory=vqa.VQAConfig)
    store_path: str = "interactions.jsonl"
    synchronous_jobs: bool = False
    max_workers: int = 2
    # the web player is served from its own origin; empty tuple disables CORS
    cors_origins: tuple[str, ...] = ("*",)


def load_server_config(path: str | None = None) -> ServerConfig:
    """Config file (JSON) with environment overrides.

    Recognized env vars: AD_STORE_PATH, AD_PROVIDER_URL, AD_PROVIDER_MODEL,
    AD_DECODER_CMD, AD_RESOLVER_CMD.
    """
    cfg = ServerConfig()
    doc = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    cfg.store_path = os.environ.get(
        "AD_STORE_PATH", doc.get("store_path", cfg.store_path)
    )
    prov = cfg.pipeline.provider
    prov.base_url = os.environ.get(
        "AD_PROVIDER_URL", doc.get("provider_url", prov.base_url)
    )
    prov.model = os.environ.get(
        "AD_PROVIDER_MODEL", doc.get("provider_model", prov.model)
    )
    ing = cfg.pipeline.ingest
    ing.decoder_cmd = os.environ.get(
        "AD_DECODER_CMD", doc.get("decoder_cmd", ing.decoder_cmd)
    )
    ing.resolver_cmd = os.environ.get(
        "AD_RESOLVER_CMD", doc.get("resolver_cmd", ing.resolver_cmd)
    )
    ing.workdir = doc.get("workdir", ing.workdir)
    cfg.cors_origins = tuple(doc.get("cors_origins", cfg.cors_origins))
    return cfg


@dataclass
class JobState:
    job_id: str
    state: str = "queued"
    detail: str | None = None
    progress: float = 0.0
    video_id: str | None = None
    session_id: str = ""

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "detail": self.detail,
            "progress": self.progress,
            "video_id": self.video_id,
        }


@dataclass
class VideoEntry:
    ref: VideoRef
    settings: CustomizationSettings
    session_id: str
    asset: object = None
    artifacts: object = None
    plan: object = None
    track: object = None


class Registry:
    """Thread-safe job and video bookkeeping."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, JobState] = {}
        self._entries: dict[str, VideoEntry] = {}
        self._counter = 0

    def new_job(self, ref: VideoRef, settings, session_id: str) -> str:
        with self._lock:
            self._counter += 1
            job_id = f"v{self._counter:04d}"
            self._jobs[job_id] = JobState(job_id=job_id, session_id=session_id)
            self._entries[job_id] = VideoEntry(
                ref=ref, settings=settings, session_id=session_id
            )
            return job_id

    def job(self, job_id: str) -> JobState | None:
        with self._lock:
            return self._jobs.get(job_id)

    def entry(self, job_id: str) -> VideoEntry | None:
        with self._lock:
            return self._entries.get(job_id)

    def advance(self, job_id: str, state: str, progress: float, detail=None):
        with self._lock:
            job = self._jobs[job_id]
            # states only move forward; failed is terminal from anywhere
            if state != "failed" and _STATE_ORDER[state] < _STATE_ORDER[job.state]:
                raise AssertionError(
                    f"job {job_id} cannot move {job.state} -> {state}"
                )
            job.state = state
            job.progress = progress
            job.detail = detail

    def bind_video(self, job_id: str, video_id: str):
        with self._lock:
            self._jobs[job_id].video_id = video_id


class SourceBody(BaseModel):
    path: str | None = None
    url: str | None = None


class SubmitBody(BaseModel):
    source: SourceBody
    settings: dict | None = None
    session_id: str | None = None
    user_id: str = "anonymous"


class RegenerateBody(BaseModel):
    settings: dict


class QuestionBody(BaseModel):
    t_s: float
    question: str
    input_mode: str = "typed"


class RatingsBody(BaseModel):
    day: int | None = None
    effectiveness: int | None = None
    enjoyment: int | None = None
    immersion: int | None = None
    alignment: int | None = None


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()
    app = FastAPI(title="audiodesc", version="0.1.0")
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    registry = Registry()
    store = SessionStore(config.store_path)
    provider = provider_from_config(config.pipeline.provider)
    pool = (
        None
        if config.synchronous_jobs
        else ThreadPoolExecutor(max_workers=config.max_workers)
    )
    app.state.registry = registry
    app.state.store = store
    app.state.provider = provider

    def execute_job(job_id: str, reuse_from: str | None = None):
        entry = registry.entry(job_id)
        try:
            if reuse_from:
                parent = registry.entry(reuse_from)
                entry.asset = parent.asset
                entry.artifacts = parent.artifacts
                registry.advance(job_id, "timing", 0.4)
                if entry.settings.frequency_s == parent.settings.frequency_s:
                    entry.plan = parent.plan
                else:
                    entry.plan = pipeline.plan_for(
                        entry.asset, entry.artifacts, entry.settings
                    )
            else:
                registry.advance(job_id, "ingesting", 0.1)
                entry.asset = pipeline.resolve(entry.ref, config.pipeline.ingest)
                registry.bind_video(job_id, entry.asset.asset_id)
                registry.advance(job_id, "timing", 0.4)
                entry.artifacts = pipeline.analyze(entry.asset, config.pipeline)
                entry.plan = pipeline.plan_for(
                    entry.asset, entry.artifacts, entry.settings
                )
            registry.advance(job_id, "generating", 0.7)
            entry.track = pipeline.generate_track(
                entry.asset,
                entry.artifacts,
                entry.plan,
                entry.settings,
                provider,
                timeout_s=config.pipeline.provider.generation_timeout_s,
            )
            registry.advance(job_id, "ready", 1.0)
        except PipelineError as exc:
            registry.advance(
                job_id, "failed", 1.0, f"{type(exc).__name__}: {exc}"
            )
        except Exception as exc:  # noqa: BLE001 - job must never hang in limbo
            registry.advance(job_id, "failed", 1.0, f"internal: {exc}")

    def submit(job_id: str, reuse_from: str | None = None):
        if pool is None:
            execute_job(job_id, reuse_from)
        else:
            pool.submit(execute_job, job_id, reuse_from)

    @app.post("/videos")
    def post_video(body: SubmitBody):
        if bool(body.source.path) == bool(body.source.url):
            raise HTTPException(400, "source needs exactly one of path or url")
        try:
            settings = (
                DEFAULT_SETTINGS
                if body.settings is None
                else validate_settings(body.settings)
            )
        except SettingsError as exc:
            raise HTTPException(400, str(exc)) from exc
        ref = (
            VideoRef.local(body.source.path)
            if body.source.path
            else VideoRef.remote(body.source.url)
        )
        session_id = body.session_id or ""
        job_id = registry.new_job(ref, settings, session_id)
        if session_id:
            store.record(
                {
                    "stream": "session",
                    "session_id": session_id,
                    "user_id": body.user_id,
                    "started_at": _utcnow(),
                    "video_id": job_id,
                    "settings": (
                        DEFAULT_SETTINGS_MARKER
                        if body.settings is None
                        else settings.to_dict()
                    ),
                }
            )
        submit(job_id)
        return {"job_id": job_id}

    @app.get("/videos/{job_id}")
    def get_status(job_id: str):
        job = registry.job(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return job.to_dict()

    @app.get("/videos/{job_id}/track")
    def get_track(job_id: str):
        job = registry.job(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        if job.state != "ready":
            raise HTTPException(409, f"job {job_id} is {job.state}, not ready")
        entry = registry.entry(job_id)
        return track_to_dict(entry.track)

    @app.post("/videos/{job_id}/regenerate")
    def post_regenerate(job_id: str, body: RegenerateBody):
        job = registry.job(job_id)
        entry = registry.entry(job_id)
        if job is None or entry is None:
            raise HTTPException(404, f"unknown job {job_id}")
        if entry.artifacts is None:
            raise HTTPException(409, f"job {job_id} has no ingested media yet")
        try:
            settings = validate_settings(body.settings)
        except SettingsError as exc:
            raise HTTPException(400, str(exc)) from exc
        if settings == entry.settings and job.state == "ready":
            return {"job_id": job_id, "cached": True}
        new_id = registry.new_job(entry.ref, settings, entry.session_id)
        registry.bind_video(new_id, job.video_id)
        submit(new_id, reuse_from=job_id)
        return {"job_id": new_id}

    @app.post("/videos/{job_id}/questions")
    def post_question(job_id: str, body: QuestionBody):
        job = registry.job(job_id)
        entry = registry.entry(job_id)
        if job is None or entry is None:
            raise HTTPException(404, f"unknown job {job_id}")
        if job.state != "ready":
            raise HTTPException(409, f"job {job_id} is {job.state}, not ready")
        if not body.question.strip():
            raise HTTPException(422, "question text is empty")
        if not 0 <= body.t_s <= entry.asset.duration_s:
            raise HTTPException(
                400,
                f"t_s {body.t_s} outside video duration {entry.asset.duration_s}",
            )
        req = vqa.VQARequest(
            video_id=job.video_id or job_id,
            t_s=body.t_s,
            question=body.question,
            input_mode=body.input_mode,
        )
        deps = vqa.VQADeps(
            asset=entry.asset,
            frames=entry.artifacts.frames,
            track=entry.track,
            provider=provider,
            store=store,
            session_id=entry.session_id or job_id,
            cfg=config.vqa,
            timeout_s=config.pipeline.provider.vqa_timeout_s,
        )
        try:
            exchange = vqa.ask(req, deps)
        except ProviderError as exc:
            raise HTTPException(504, f"provider failure: {exc}") from exc
        except EmptyQuestion as exc:
            raise HTTPException(422, str(exc)) from exc
        except PipelineError as exc:
            raise HTTPException(502, f"{type(exc).__name__}: {exc}") from exc
        return exchange.to_dict()

    @app.post("/sessions/{session_id}/ratings", status_code=204)
    def post_ratings(session_id: str, body: RatingsBody):
        event = {"stream": "rating", "session_id": session_id}
        for key in ("day", "effectiveness", "enjoyment", "immersion", "alignment"):
            value = getattr(body, key)
            if value is not None:
                event[key] = value
        try:
            store.record(event)
        except SchemaViolation as exc:
            raise HTTPException(400, str(exc)) from exc
        return None

    @app.get("/analytics/{report}")
    def get_analytics(report: str):
        log = store.load()
        if report == "customization":
            return customization_distribution(log).to_dict()
        if report == "questions":
            return question_distribution(log).to_dict()
        if report == "length-trend":
            return {
                "days": [
                    {
                        "day": p.day,
                        "date": p.date,
                        "n": p.n,
                        "mean": p.mean,
                        "sd": p.sd,
                    }
                    for p in length_trend(log)
                ]
            }
        raise HTTPException(404, f"unknown report {report!r}")

    return app


def _utcnow() -> str:
    from datetime import datetime, timezone

    return datetime.now(timezone.utc).isoformat()
