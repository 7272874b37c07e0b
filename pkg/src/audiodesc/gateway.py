"""Provider-agnostic model gateway.

One call contract covers every provider: (prompt text, ordered media) ->
response text. On top of that sit response parsing, timestamp snapping,
the word-count policy with a single repair round-trip, and the VQA answer
cap. A deterministic mock provider makes the whole pipeline runnable and
bit-reproducible offline.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import EmptyAnswer, MalformedOutput, PlanMismatch, ProviderError
from .prompts import PromptBundle
from .timing import TimestampPlan

SNAP_WINDOW_S = 0.5
ANSWER_WORD_CAP = 120
TRUNCATION_MARKER = "[shortened]"
# initial call + one parse retry + one repair round-trip
MAX_CALLS_PER_GENERATION = 3

FLAG_WORD_COUNT_LOW = "word_count_low"
FLAG_WORD_COUNT_HIGH = "word_count_high"
FLAG_REPAIR_ATTEMPTED = "repair_attempted"
FLAG_REPAIR_DISCARDED = "repair_discarded"


@dataclass
class ProviderConfig:
    base_url: str = "mock:"
    model: str = "mock-multimodal"
    api_key_env: str = "AD_PROVIDER_KEY"
    generation_timeout_s: float = 120.0
    vqa_timeout_s: float = 30.0
    max_concurrency: int = 4
    mock_manifest: str | None = None


@dataclass(frozen=True)
class DescriptionItem:
    start_s: float
    text: str
    flags: tuple[str, ...] = ()

    @property
    def word_count(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class VideoMetadata:
    video_id: str
    descriptions: tuple[DescriptionItem, ...]
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ModelResponse:
    raw_text: str
    parsed: object | None
    latency_ms: int
    provider_id: str

    def __post_init__(self):
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be non-negative")


# Process-wide cap on concurrent provider calls.
_call_gate = threading.BoundedSemaphore(4)
_call_gate_size = 4


def configure_concurrency(max_concurrency: int) -> None:
    global _call_gate, _call_gate_size
    if max_concurrency < 1:
        raise ValueError("max_concurrency must be >= 1")
    _call_gate = threading.BoundedSemaphore(max_concurrency)
    _call_gate_size = max_concurrency


class Provider:
    """Base contract: chat(text, media paths) -> response text."""

    provider_id = "base"

    def chat(
        self, text: str, media_paths: tuple[str, ...], timeout_s: float
    ) -> str:  # pragma: no cover
        raise NotImplementedError


class HTTPProvider(Provider):
    """Minimal JSON-over-HTTP adapter.

    Wire shape: POST base_url with {model, input: [text part, image parts
    as base64]} and a bearer token from the configured env var; the reply
    is {"text": ...}. Adapting to a specific vendor API means subclassing
    and overriding `chat` only.
    """

    provider_id = "http"

    def __init__(self, cfg: ProviderConfig):
        self.cfg = cfg

    def chat(self, text: str, media_paths: tuple[str, ...], timeout_s: float) -> str:
        parts: list[dict] = [{"type": "text", "text": text}]
        for path in media_paths:
            with open(path, "rb") as fh:
                data = fh.read()
            parts.append(
                {
                    "type": "image",
                    "media_type": "image/x-portable-graymap",
                    "data_b64": base64.b64encode(data).decode("ascii"),
                }
            )
        headers = {}
        key = os.environ.get(self.cfg.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = requests.post(
                self.cfg.base_url,
                json={"model": self.cfg.model, "input": parts},
                headers=headers,
                timeout=timeout_s,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"provider transport failure: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"provider returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            return resp.json()["text"]
        except (ValueError, KeyError) as exc:
            raise ProviderError(f"provider reply missing text field: {exc}") from exc


_LOREM_WORDS = (
    "amber", "light", "drifts", "across", "the", "quiet", "room", "while",
    "figures", "move", "between", "shadows", "near", "an", "open", "window",
    "slow", "gestures", "carry", "meaning", "under", "pale", "morning", "sky",
)


def _det_words(seed: str, n: int) -> str:
    """Deterministic pseudo-prose: exactly n whitespace-delimited words."""
    words = []
    for i in range(n):
        digest = hashlib.sha256(f"{seed}:{i}".encode()).digest()
        idx = int.from_bytes(digest[:4], "big") % len(_LOREM_WORDS)
        words.append(_LOREM_WORDS[idx])
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


_TARGET_RE = re.compile(r"Target approximately (\d+) words")
_STAMP_LINE_RE = re.compile(r"^\d+\.\d{3}$", re.MULTILINE)


class MockProvider(Provider):
    """Deterministic offline provider.

    A manifest maps prompt fingerprints (sha256 prefix of the prompt text)
    to canned response strings; unknown prompts fall back to an echo that
    reads the timestamps and target word count out of the prompt itself and
    fabricates stable descriptions.
    """

    provider_id = "mock"

    def __init__(self, manifest: dict[str, str] | None = None):
        self.manifest = dict(manifest or {})
        self.call_count = 0

    @classmethod
    def from_manifest_file(cls, path: str) -> "MockProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    @staticmethod
    def fingerprint(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def chat(self, text: str, media_paths: tuple[str, ...], timeout_s: float) -> str:
        self.call_count += 1
        fp = self.fingerprint(text)
        if fp in self.manifest:
            return self.manifest[fp]
        if "visual question answering aide" in text:
            return self._echo_answer(text)
        return self._echo_metadata(text)

    def _echo_metadata(self, text: str) -> str:
        target = _TARGET_RE.search(text)
        n_words = int(target.group(1)) if target else 50
        stamps = [float(m) for m in _STAMP_LINE_RE.findall(text)]
        descriptions = [
            {"start_s": t, "text": _det_words(f"ad:{t:.3f}:{n_words}", n_words)}
            for t in stamps
        ]
        body = json.dumps(
            {"video_id": "mock-video", "descriptions": descriptions}, indent=2
        )
        return f"```json\n{body}\n```"

    def _echo_answer(self, text: str) -> str:
        return _det_words(f"vqa:{self.fingerprint(text)}", 24)


class ScriptedProvider(Provider):
    """Replays a fixed response sequence; for adversarial-path tests."""

    provider_id = "scripted"

    def __init__(self, responses: list[str]):
        self._responses = list(responses)
        self.call_count = 0

    def chat(self, text: str, media_paths: tuple[str, ...], timeout_s: float) -> str:
        self.call_count += 1
        if not self._responses:
            raise ProviderError("scripted provider has no responses left")
        return self._responses.pop(0)


def provider_from_config(cfg: ProviderConfig) -> Provider:
    if cfg.base_url.startswith("mock"):
        if cfg.mock_manifest:
            return MockProvider.from_manifest_file(cfg.mock_manifest)
        return MockProvider()
    return HTTPProvider(cfg)


def _call(provider: Provider, text: str, media: tuple[str, ...], timeout_s: float) -> ModelResponse:
    started = time.monotonic()
    with _call_gate:
        raw = provider.chat(text, media, timeout_s)
    if not isinstance(raw, str):
        raise ProviderError(f"provider returned {type(raw).__name__}, expected str")
    latency = int((time.monotonic() - started) * 1000)
    return ModelResponse(
        raw_text=raw, parsed=None, latency_ms=latency, provider_id=provider.provider_id
    )


_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _extract_json(raw: str) -> dict | None:
    """Pull a JSON object out of a model reply, code fences tolerated."""
    candidates = [raw.strip()]
    fenced = _FENCE_RE.search(raw)
    if fenced:
        candidates.insert(0, fenced.group(1).strip())
    first, last = raw.find("{"), raw.rfind("}")
    if first != -1 and last > first:
        candidates.append(raw[first : last + 1])
    for text in candidates:
        try:
            doc = json.loads(text)
        except ValueError:
            continue
        if isinstance(doc, dict):
            return doc
    return None


def _snap_start(start: float, planned: tuple[float, ...]) -> float:
    deltas = sorted((abs(start - t), t) for t in planned)
    best_delta, best_t = deltas[0]
    if best_delta > SNAP_WINDOW_S + 1e-9:
        raise PlanMismatch(
            f"timestamp {start} is {best_delta:.3f} s from the nearest planned "
            f"point; snap window is {SNAP_WINDOW_S} s"
        )
    if len(deltas) > 1 and abs(deltas[1][0] - best_delta) < 1e-9:
        raise PlanMismatch(
            f"timestamp {start} is equidistant from planned points "
            f"{best_t} and {deltas[1][1]}"
        )
    return best_t


def _validate_metadata(
    doc: dict, plan: TimestampPlan, target_length: int
) -> tuple[VideoMetadata, list[float]]:
    """Schema-check, snap timestamps, flag word counts.

    Returns the metadata plus the snapped timestamps of entries violating
    the word-count policy (the repair list).
    """
    descriptions = doc.get("descriptions")
    if not isinstance(descriptions, list):
        raise MalformedOutput("response lacks a descriptions list")
    video_id = doc.get("video_id", "")
    if not isinstance(video_id, str):
        raise MalformedOutput("video_id must be a string")
    planned = plan.times
    if not planned:
        raise PlanMismatch("plan has no points to map descriptions onto")

    lo = 0.5 * target_length
    hi = 1.5 * target_length
    items: list[DescriptionItem] = []
    violations: list[float] = []
    seen: set[float] = set()
    for entry in descriptions:
        if not isinstance(entry, dict):
            raise MalformedOutput("description entry is not an object")
        start = entry.get("start_s")
        text = entry.get("text")
        if isinstance(start, bool) or not isinstance(start, (int, float)):
            raise MalformedOutput(f"bad start_s: {start!r}")
        if not isinstance(text, str) or not text.strip():
            raise MalformedOutput("description text empty or missing")
        snapped = _snap_start(float(start), planned)
        if snapped in seen:
            raise PlanMismatch(
                f"two descriptions map to the same planned point {snapped}"
            )
        seen.add(snapped)
        text = text.strip()
        n = len(text.split())
        flags: tuple[str, ...] = ()
        if n < lo:
            flags = (FLAG_WORD_COUNT_LOW,)
            violations.append(snapped)
        elif n > hi:
            flags = (FLAG_WORD_COUNT_HIGH,)
            violations.append(snapped)
        items.append(DescriptionItem(start_s=snapped, text=text, flags=flags))

    items.sort(key=lambda item: item.start_s)
    meta = VideoMetadata(video_id=video_id, descriptions=tuple(items))
    return meta, violations


_RETRY_SUFFIX = (
    "\n\nYour previous reply could not be parsed. Respond with only the JSON "
    "object, no commentary."
)


def _repair_suffix(violations: list[float], target_length: int) -> str:
    listed = ", ".join(f"{t:.3f}" for t in violations)
    return (
        f"\n\nThe descriptions at these timestamps missed the target of "
        f"approximately {target_length} words: {listed}. Rewrite those "
        f"descriptions closer to the target and resend the full JSON object."
    )


def generate_descriptions(
    bundle: PromptBundle,
    plan: TimestampPlan,
    target_length: int,
    provider: Provider,
    timeout_s: float = 120.0,
) -> VideoMetadata:
    """Run one description generation with parse retry and repair.

    Call budget: 1 initial + up to 1 parse retry + up to 1 word-count
    repair, never more than 3 provider calls.

    Raises:
        ProviderError: transport or provider-side failure.
        MalformedOutput: no parseable response after the retry.
        PlanMismatch: response timestamps cannot map onto the plan.
    """
    calls = 0

    def call(text: str) -> str:
        nonlocal calls
        if calls >= MAX_CALLS_PER_GENERATION:
            raise ProviderError("provider call budget exhausted")
        calls += 1
        return _call(provider, text, bundle.media_paths, timeout_s).raw_text

    raw = call(bundle.text)
    doc = _extract_json(raw)
    if doc is None:
        raw = call(bundle.text + _RETRY_SUFFIX)
        doc = _extract_json(raw)
        if doc is None:
            raise MalformedOutput(
                "provider reply had no parseable JSON after retry"
            )

    meta, violations = _validate_metadata(doc, plan, target_length)
    if not violations or calls >= MAX_CALLS_PER_GENERATION:
        return meta

    # One repair pass; a bad repair reply never discards the accepted result.
    repaired_raw = call(bundle.text + _repair_suffix(violations, target_length))
    repaired_doc = _extract_json(repaired_raw)
    if repaired_doc is None:
        return VideoMetadata(
            video_id=meta.video_id,
            descriptions=meta.descriptions,
            flags=(FLAG_REPAIR_ATTEMPTED, FLAG_REPAIR_DISCARDED),
        )
    try:
        repaired_meta, _ = _validate_metadata(repaired_doc, plan, target_length)
    except (MalformedOutput, PlanMismatch):
        return VideoMetadata(
            video_id=meta.video_id,
            descriptions=meta.descriptions,
            flags=(FLAG_REPAIR_ATTEMPTED, FLAG_REPAIR_DISCARDED),
        )
    return VideoMetadata(
        video_id=repaired_meta.video_id,
        descriptions=repaired_meta.descriptions,
        flags=(FLAG_REPAIR_ATTEMPTED,),
    )


_SENTENCE_END_RE = re.compile(r"[.!?][\"')\]]*$")


def truncate_answer(text: str, word_cap: int = ANSWER_WORD_CAP) -> str:
    """Cap at word_cap words, cutting at the last sentence end inside the cap."""
    words = text.split()
    if len(words) <= word_cap:
        return text
    kept = words[:word_cap]
    cut = len(kept)
    for i in range(len(kept) - 1, -1, -1):
        if _SENTENCE_END_RE.search(kept[i]):
            cut = i + 1
            break
    return " ".join(kept[:cut]) + " " + TRUNCATION_MARKER


def answer_question(
    bundle: PromptBundle, provider: Provider, timeout_s: float = 30.0
) -> str:
    """Ask one visual question; trimmed, length-capped answer text.

    Raises:
        ProviderError: transport or provider-side failure.
        EmptyAnswer: the provider replied with blank text.
    """
    response = _call(provider, bundle.text, bundle.media_paths, timeout_s)
    text = response.raw_text.strip()
    if not text:
        raise EmptyAnswer("provider returned a blank answer")
    return truncate_answer(text)
