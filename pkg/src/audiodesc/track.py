"""The validated AD document: cues, playback scheduling, serialization.

A track is immutable once built. Spoken duration is estimated against a
TTS rate (words per second); overlap between a cue's estimated end and the
next cue's start is advisory only, playback is never blocked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .customization import CustomizationSettings, validate as validate_settings
from .errors import UnsupportedFormat
from .gateway import VideoMetadata
from .timing import TimestampPlan, format_vtt_time

DEFAULT_TTS_RATE_WPS = 2.5
TTS_RATE_MIN, TTS_RATE_MAX = 1.0, 6.0
TRACK_FORMAT_VERSION = 1

FLAG_EMPTY_TRACK = "empty_track"


@dataclass(frozen=True)
class Cue:
    start_s: float
    text: str
    word_count: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.word_count != len(self.text.split()):
            raise ValueError(
                f"word_count {self.word_count} does not match text "
                f"({len(self.text.split())} tokens)"
            )


@dataclass(frozen=True)
class ADTrack:
    video_id: str
    cues: tuple[Cue, ...]
    settings_snapshot: CustomizationSettings
    plan_snapshot: TimestampPlan
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        starts = [c.start_s for c in self.cues]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("cue start times must strictly increase")


@dataclass(frozen=True)
class ScheduleItem:
    start_s: float
    est_end_s: float
    cue_index: int
    overlap: bool = False


@dataclass(frozen=True)
class PlaybackSchedule:
    items: tuple[ScheduleItem, ...]
    tts_rate_wps: float


def from_metadata(
    meta: VideoMetadata,
    settings: CustomizationSettings,
    plan: TimestampPlan,
) -> ADTrack:
    """One cue per description; gateway word-count flags ride along."""
    cues = tuple(
        Cue(
            start_s=item.start_s,
            text=item.text,
            word_count=len(item.text.split()),
            flags=item.flags,
        )
        for item in meta.descriptions
    )
    flags = tuple(meta.flags)
    if not cues:
        flags = flags + (FLAG_EMPTY_TRACK,)
    return ADTrack(
        video_id=meta.video_id,
        cues=cues,
        settings_snapshot=settings,
        plan_snapshot=plan,
        flags=flags,
    )


def schedule(track: ADTrack, tts_rate_wps: float = DEFAULT_TTS_RATE_WPS) -> PlaybackSchedule:
    """Estimated speech windows at the given rate; marks advisory overlaps."""
    if not TTS_RATE_MIN <= tts_rate_wps <= TTS_RATE_MAX:
        raise ValueError(
            f"tts_rate_wps must be in [{TTS_RATE_MIN}, {TTS_RATE_MAX}]"
        )
    items = []
    for i, cue in enumerate(track.cues):
        est_end = cue.start_s + cue.word_count / tts_rate_wps
        overlap = i + 1 < len(track.cues) and est_end > track.cues[i + 1].start_s
        items.append(
            ScheduleItem(
                start_s=cue.start_s,
                est_end_s=est_end,
                cue_index=i,
                overlap=overlap,
            )
        )
    return PlaybackSchedule(items=tuple(items), tts_rate_wps=tts_rate_wps)


def track_to_dict(track: ADTrack) -> dict:
    return {
        "format_version": TRACK_FORMAT_VERSION,
        "video_id": track.video_id,
        "settings": track.settings_snapshot.to_dict(),
        "plan": track.plan_snapshot.to_dict(),
        "cues": [
            {
                "start_s": c.start_s,
                "text": c.text,
                "word_count": c.word_count,
                "flags": list(c.flags),
            }
            for c in track.cues
        ],
        "flags": list(track.flags),
    }


def track_from_dict(doc: dict) -> ADTrack:
    if doc.get("format_version") != TRACK_FORMAT_VERSION:
        raise UnsupportedFormat(
            f"unknown track format_version {doc.get('format_version')!r}"
        )
    return ADTrack(
        video_id=doc["video_id"],
        cues=tuple(
            Cue(
                start_s=float(c["start_s"]),
                text=c["text"],
                word_count=int(c["word_count"]),
                flags=tuple(c.get("flags", ())),
            )
            for c in doc["cues"]
        ),
        settings_snapshot=validate_settings(doc["settings"]),
        plan_snapshot=TimestampPlan.from_dict(doc["plan"]),
        flags=tuple(doc.get("flags", ())),
    )


def serialize(track: ADTrack, format: str = "structured") -> bytes:
    """Emit the track document.

    structured: versioned JSON, lossless round-trip via parse_track.
    vtt: one cue block per description, end times from the default-rate
    schedule estimate.

    Raises:
        UnsupportedFormat: format not one of the two.
    """
    if format == "structured":
        return (
            json.dumps(track_to_dict(track), indent=2, sort_keys=True) + "\n"
        ).encode("utf-8")
    if format == "vtt":
        sched = schedule(track, DEFAULT_TTS_RATE_WPS)
        lines = ["WEBVTT", ""]
        for item in sched.items:
            cue = track.cues[item.cue_index]
            lines.append(
                f"{format_vtt_time(item.start_s)} --> {format_vtt_time(item.est_end_s)}"
            )
            # VTT payloads are single cues; internal newlines would split them
            lines.append(" ".join(cue.text.split()))
            lines.append("")
        return ("\n".join(lines)).encode("utf-8")
    raise UnsupportedFormat(f"unknown serialization format {format!r}")


def parse_track(data: bytes) -> ADTrack:
    """Inverse of serialize(structured)."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise UnsupportedFormat(f"not a structured track document: {exc}") from exc
    if not isinstance(doc, dict):
        raise UnsupportedFormat("structured track must be a JSON object")
    return track_from_dict(doc)
