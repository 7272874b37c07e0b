"""In-playback visual question answering.

Context is local to the asked moment: the nearest sampled frame plus a few
neighbors, and the AD text so far. Questions are classified against a
versioned keyword codebook so analytics stay deterministic and auditable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources

from .errors import EmptyQuestion, NoFrames, PipelineError
from .gateway import Provider, answer_question
from .ingest import FrameSample, MediaAsset
from .prompts import build_vqa_prompt
from .track import ADTrack

INPUT_MODES = ("typed", "spoken")
UNCLASSIFIED = "unclassified"
ACCURACY_LEVELS = ("accurate", "partially_accurate", "incorrect")

# Local-context limitation: distant-moment reasoning needs a rewind.
INFER_HINT = (
    "Answers draw only on frames near the asked moment; for events elsewhere "
    "in the video, seek there and ask again."
)

ERROR_MARKER = "[unanswered]"

_CODEBOOK_NAME = "question_codebook.json"


@dataclass
class VQAConfig:
    n_before: int = 2
    n_after: int = 2
    spacing_s: float = 1.0


@dataclass(frozen=True)
class VQARequest:
    video_id: str
    t_s: float
    question: str
    input_mode: str = "typed"

    def __post_init__(self):
        if self.input_mode not in INPUT_MODES:
            raise ValueError(f"input_mode must be one of {INPUT_MODES}")


@dataclass(frozen=True)
class VQAExchange:
    request: VQARequest
    answer: str
    question_type: str
    asked_at: str
    accuracy_rating: str | None = None
    hint: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "video_id": self.request.video_id,
            "t_s": self.request.t_s,
            "question": self.request.question,
            "input_mode": self.request.input_mode,
            "answer": self.answer,
            "question_type": self.question_type,
            "asked_at": self.asked_at,
            "accuracy_rating": self.accuracy_rating,
            "hint": self.hint,
            "error": self.error,
        }


def _nearest(frames: list[FrameSample], t_s: float) -> FrameSample:
    return min(frames, key=lambda f: (abs(f.t_s - t_s), f.t_s))


def assemble_context(
    asset: MediaAsset,
    frames: list[FrameSample],
    t_s: float,
    cfg: VQAConfig | None = None,
) -> tuple[FrameSample, list[FrameSample]]:
    """Pick the main frame (nearest to t_s) and its spaced neighbors.

    Neighbor targets step out by cfg.spacing_s on both sides and are
    dropped beyond the media bounds; adjacent frames are temporal-ordered
    and never duplicate the main frame.

    Raises:
        NoFrames: the frame list is empty.
    """
    cfg = cfg or VQAConfig()
    if not frames:
        raise NoFrames("no sampled frames available")
    main = _nearest(frames, t_s)

    targets = []
    for k in range(cfg.n_before, 0, -1):
        targets.append(main.t_s - k * cfg.spacing_s)
    for k in range(1, cfg.n_after + 1):
        targets.append(main.t_s + k * cfg.spacing_s)

    adjacent: list[FrameSample] = []
    seen = {main.t_s}
    for target in targets:
        if not 0 <= target <= asset.duration_s:
            continue
        frame = _nearest(frames, target)
        if frame.t_s in seen:
            continue
        seen.add(frame.t_s)
        adjacent.append(frame)
    adjacent.sort(key=lambda f: f.t_s)
    return main, adjacent


def track_context_text(track: ADTrack | None) -> str:
    if track is None or not track.cues:
        return ""
    return "\n".join(f"[{c.start_s:.3f}] {c.text}" for c in track.cues)


@dataclass(frozen=True)
class _Rule:
    name: str
    patterns: tuple[re.Pattern, ...]


class QuestionClassifier:
    """Ordered first-match keyword rules from the codebook data file."""

    def __init__(self, codebook: dict):
        if codebook.get("version") != 1:
            raise ValueError(f"unknown codebook version {codebook.get('version')!r}")
        self.fallback = codebook["fallback"]
        self.rules = tuple(
            _Rule(
                name=entry["name"],
                patterns=tuple(
                    re.compile(p, re.IGNORECASE) for p in entry["patterns"]
                ),
            )
            for entry in codebook["types"]
        )
        self.labels = tuple(r.name for r in self.rules) + (self.fallback,)

    @classmethod
    def load(cls) -> "QuestionClassifier":
        text = (
            resources.files("audiodesc.templates") / _CODEBOOK_NAME
        ).read_text(encoding="utf-8")
        return cls(json.loads(text))

    def classify(self, question: str) -> str:
        for rule in self.rules:
            if any(p.search(question) for p in rule.patterns):
                return rule.name
        return self.fallback


_classifier: QuestionClassifier | None = None


def classify_question(question: str) -> str:
    """First matching codebook rule, or the unclassified fallback."""
    global _classifier
    if _classifier is None:
        _classifier = QuestionClassifier.load()
    return _classifier.classify(question)


@dataclass
class VQADeps:
    asset: MediaAsset
    frames: list[FrameSample]
    track: ADTrack | None
    provider: Provider
    store: object | None = None  # SessionStore-compatible: record(event)
    session_id: str = ""
    cfg: VQAConfig = field(default_factory=VQAConfig)
    timeout_s: float = 30.0
    clock: object = None  # () -> ISO-8601 string, overridable in tests

    def now(self) -> str:
        if self.clock is not None:
            return self.clock()
        return datetime.now(timezone.utc).isoformat()


def _persist(deps: VQADeps, exchange: VQAExchange) -> None:
    if deps.store is None:
        return
    deps.store.record(
        {
            "stream": "exchange",
            "session_id": deps.session_id,
            **exchange.to_dict(),
        }
    )


def ask(req: VQARequest, deps: VQADeps) -> VQAExchange:
    """Answer one question; exactly one exchange is persisted either way.

    Raises:
        EmptyQuestion: blank question text.
        ValueError: t_s outside the video.
        PipelineError subclasses from the gateway, after persisting the
        failed exchange with an error marker.
    """
    question = req.question.strip()
    if not question:
        raise EmptyQuestion("question text is empty")
    if not 0 <= req.t_s <= deps.asset.duration_s:
        raise ValueError(
            f"t_s {req.t_s} outside video duration {deps.asset.duration_s}"
        )

    main, adjacent = assemble_context(deps.asset, deps.frames, req.t_s, deps.cfg)
    bundle = build_vqa_prompt(
        question=question,
        main_frame_path=main.path,
        adjacent_frame_paths=[f.path for f in adjacent],
        track_context=track_context_text(deps.track),
    )
    qtype = classify_question(question)
    hint = INFER_HINT if qtype == "infer_from_video" else None

    try:
        answer = answer_question(bundle, deps.provider, deps.timeout_s)
    except PipelineError as exc:
        failed = VQAExchange(
            request=req,
            answer=ERROR_MARKER,
            question_type=qtype,
            asked_at=deps.now(),
            hint=hint,
            error=type(exc).__name__,
        )
        _persist(deps, failed)
        raise

    exchange = VQAExchange(
        request=req,
        answer=answer,
        question_type=qtype,
        asked_at=deps.now(),
        hint=hint,
    )
    _persist(deps, exchange)
    return exchange
