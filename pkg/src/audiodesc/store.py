"""Append-only interaction journal plus study-style analytics.

Storage is one JSONL file: each line is an event in the session, exchange,
or rating stream with a per-stream monotonic id. Analytics recompute from
the journal every time; there is no mutable derived state to corrupt.

Percent and trend figures round half-up to one decimal, the convention the
distribution tables use.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path

from .customization import (
    CustomizationSettings,
    validate as validate_settings,
)
from .errors import SchemaViolation, StorageFailure

STREAMS = ("session", "exchange", "rating")
RATING_KEYS = ("effectiveness", "enjoyment", "immersion", "alignment")
DEFAULT_SETTINGS_MARKER = "default"

LENGTH_BUCKETS = ((15, 25), (26, 50), (51, 75), (76, 100))

QUESTION_TYPES = (
    "describe_scene",
    "identify_color",
    "identify_presence",
    "identify_subject",
    "identify_feature",
    "describe_character",
    "infer_from_video",
    "unclassified",
)
ACCURACY_LEVELS = ("accurate", "partially_accurate", "incorrect")


def round1(value: float) -> float:
    """Half-up rounding to one decimal (bankers' rounding would drift)."""
    return float(Decimal(repr(value)).quantize(Decimal("0.1"), ROUND_HALF_UP))


@dataclass
class SessionRecord:
    session_id: str
    user_id: str
    started_at: str
    video_id: str
    settings: CustomizationSettings | None  # None = default, uncustomized
    exchanges: list[dict] = field(default_factory=list)
    daily_ratings: dict | None = None


@dataclass
class InteractionLog:
    sessions: list[SessionRecord]

    def all_exchanges(self) -> list[dict]:
        return [e for s in self.sessions for e in s.exchanges]


@dataclass(frozen=True)
class ReportRow:
    dimension: str
    option: str
    count: int
    percent: float


@dataclass
class DistributionReport:
    rows: list[ReportRow]
    denominator: int

    def rows_for(self, dimension: str) -> list[ReportRow]:
        return [r for r in self.rows if r.dimension == dimension]

    def to_dict(self) -> dict:
        return {
            "denominator": self.denominator,
            "rows": [
                {
                    "dimension": r.dimension,
                    "option": r.option,
                    "count": r.count,
                    "percent": r.percent,
                }
                for r in self.rows
            ],
        }


def _check_rating_value(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(f"rating '{name}' must be an integer, got {value!r}")
    if not 1 <= value <= 5:
        raise SchemaViolation(f"rating '{name}' must be in [1, 5], got {value}")
    return value


def _validate_event(event: dict) -> dict:
    if not isinstance(event, dict):
        raise SchemaViolation("event must be a mapping")
    stream = event.get("stream")
    if stream not in STREAMS:
        raise SchemaViolation(f"unknown stream {stream!r}")
    body = {k: v for k, v in event.items() if k != "stream"}

    if stream == "session":
        for key in ("session_id", "user_id", "started_at", "video_id"):
            if not isinstance(body.get(key), str) or not body[key]:
                raise SchemaViolation(f"session event needs string '{key}'")
        settings = body.get("settings", DEFAULT_SETTINGS_MARKER)
        if settings != DEFAULT_SETTINGS_MARKER:
            body["settings"] = validate_settings(settings).to_dict()
    elif stream == "exchange":
        for key in ("session_id", "question", "answer", "question_type"):
            if not isinstance(body.get(key), str):
                raise SchemaViolation(f"exchange event needs string '{key}'")
        if body["question_type"] not in QUESTION_TYPES:
            raise SchemaViolation(
                f"unknown question_type {body['question_type']!r}"
            )
        rating = body.get("accuracy_rating")
        if rating is not None and rating not in ACCURACY_LEVELS:
            raise SchemaViolation(f"unknown accuracy_rating {rating!r}")
    else:
        if not isinstance(body.get("session_id"), str) or not body["session_id"]:
            raise SchemaViolation("rating event needs string 'session_id'")
        for key in RATING_KEYS:
            if key in body:
                _check_rating_value(key, body[key])
        if not any(key in body for key in RATING_KEYS):
            raise SchemaViolation(
                f"rating event needs at least one of {RATING_KEYS}"
            )
    return {"stream": stream, **body}


class SessionStore:
    """Single-file JSONL journal; one writer, any number of readers."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._next_ids = {stream: 1 for stream in STREAMS}
        if self.path.exists():
            for event in self._read_events():
                stream = event["stream"]
                self._next_ids[stream] = max(
                    self._next_ids[stream], event["id"] + 1
                )

    def _read_events(self) -> list[dict]:
        events = []
        if not self.path.exists():  # nothing recorded yet
            return events
        try:
            with self.path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        events.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise StorageFailure(
                            f"corrupt journal line {lineno} in {self.path}: {exc}"
                        ) from exc
        except OSError as exc:
            raise StorageFailure(f"cannot read journal {self.path}: {exc}") from exc
        return events

    def record(self, event: dict) -> int:
        """Append one validated event; returns its per-stream id.

        Raises:
            SchemaViolation: the event does not match its stream's schema.
            StorageFailure: the journal cannot be written.
        """
        validated = _validate_event(event)
        with self._lock:
            event_id = self._next_ids[validated["stream"]]
            self._next_ids[validated["stream"]] = event_id + 1
            entry = {
                "id": event_id,
                "recorded_at": datetime.now(timezone.utc).isoformat(),
                **validated,
            }
            line = json.dumps(entry, sort_keys=True)
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
            except OSError as exc:
                raise StorageFailure(
                    f"cannot append to journal {self.path}: {exc}"
                ) from exc
        return event_id

    def events(self, stream: str | None = None) -> list[dict]:
        all_events = self._read_events()
        if stream is None:
            return all_events
        return [e for e in all_events if e["stream"] == stream]

    def load(self) -> InteractionLog:
        """Fold the journal into per-session records."""
        sessions: dict[str, SessionRecord] = {}
        for event in self._read_events():
            stream = event["stream"]
            if stream == "session":
                raw = event.get("settings", DEFAULT_SETTINGS_MARKER)
                settings = (
                    None
                    if raw == DEFAULT_SETTINGS_MARKER
                    else validate_settings(raw)
                )
                sessions[event["session_id"]] = SessionRecord(
                    session_id=event["session_id"],
                    user_id=event["user_id"],
                    started_at=event["started_at"],
                    video_id=event["video_id"],
                    settings=settings,
                )
            elif stream == "exchange":
                record = sessions.get(event["session_id"])
                if record is not None:
                    record.exchanges.append(event)
            else:
                record = sessions.get(event["session_id"])
                if record is not None:
                    record.daily_ratings = {
                        k: event[k] for k in RATING_KEYS if k in event
                    }
        return InteractionLog(sessions=list(sessions.values()))


# --- analytics --------------------------------------------------------------

def _length_bucket(length: int) -> str:
    for lo, hi in LENGTH_BUCKETS:
        if lo <= length <= hi:
            return f"{lo}-{hi}"
    return "out_of_range"


def customization_distribution(log: InteractionLog) -> DistributionReport:
    """Per-dimension option counts over the sessions that customized.

    Length is bucketed; free-form usage reports used / not_used so every
    dimension's percents sum to 100.
    """
    customized = [s for s in log.sessions if s.settings is not None]
    n = len(customized)
    rows: list[ReportRow] = []
    if n == 0:
        return DistributionReport(rows=rows, denominator=0)

    counters: dict[str, dict[str, int]] = {
        "frequency": {},
        "length": {},
        "emphasis": {},
        "subjectivity": {},
        "colors": {},
        "free_form": {},
    }
    for s in customized:
        cfg = s.settings
        counters["frequency"][f"{cfg.frequency_s}s"] = (
            counters["frequency"].get(f"{cfg.frequency_s}s", 0) + 1
        )
        bucket = _length_bucket(cfg.target_length_words)
        counters["length"][bucket] = counters["length"].get(bucket, 0) + 1
        counters["emphasis"][cfg.emphasis] = (
            counters["emphasis"].get(cfg.emphasis, 0) + 1
        )
        counters["subjectivity"][cfg.subjectivity] = (
            counters["subjectivity"].get(cfg.subjectivity, 0) + 1
        )
        counters["colors"][cfg.colors] = counters["colors"].get(cfg.colors, 0) + 1
        ff = "used" if cfg.free_form_guidelines else "not_used"
        counters["free_form"][ff] = counters["free_form"].get(ff, 0) + 1

    for dimension, options in counters.items():
        ordered = sorted(options.items(), key=lambda kv: (-kv[1], kv[0]))
        for option, count in ordered:
            rows.append(
                ReportRow(
                    dimension=dimension,
                    option=option,
                    count=count,
                    percent=round1(100.0 * count / n),
                )
            )
    return DistributionReport(rows=rows, denominator=n)


def question_distribution(log: InteractionLog) -> DistributionReport:
    """Question-type counts, cross-tabulated by accuracy where rated."""
    exchanges = log.all_exchanges()
    n = len(exchanges)
    rows: list[ReportRow] = []
    if n == 0:
        return DistributionReport(rows=rows, denominator=0)

    by_type: dict[str, list[dict]] = {}
    for e in exchanges:
        by_type.setdefault(e["question_type"], []).append(e)

    for qtype in sorted(by_type, key=lambda t: (-len(by_type[t]), t)):
        group = by_type[qtype]
        rows.append(
            ReportRow(
                dimension="question_type",
                option=qtype,
                count=len(group),
                percent=round1(100.0 * len(group) / n),
            )
        )
        rated = [e for e in group if e.get("accuracy_rating")]
        for level in ACCURACY_LEVELS:
            count = sum(1 for e in rated if e["accuracy_rating"] == level)
            if count:
                rows.append(
                    ReportRow(
                        dimension=f"accuracy:{qtype}",
                        option=level,
                        count=count,
                        percent=round1(100.0 * count / len(rated)),
                    )
                )
    return DistributionReport(rows=rows, denominator=n)


@dataclass(frozen=True)
class TrendPoint:
    day: int
    date: str
    n: int
    mean: float
    sd: float


def length_trend(log: InteractionLog) -> list[TrendPoint]:
    """Per-day mean and population SD of the customized target length.

    Days are the distinct calendar dates of session start (UTC unless the
    timestamp carries an offset), ranked in order.
    """
    by_date: dict[str, list[int]] = {}
    for s in log.sessions:
        if s.settings is None:
            continue
        date = s.started_at[:10]
        by_date.setdefault(date, []).append(s.settings.target_length_words)

    points = []
    for day, date in enumerate(sorted(by_date), start=1):
        values = by_date[date]
        n = len(values)
        mean = sum(values) / n
        variance = sum((v - mean) ** 2 for v in values) / n
        points.append(
            TrendPoint(
                day=day,
                date=date,
                n=n,
                mean=round1(mean),
                sd=round1(variance**0.5),
            )
        )
    return points


# --- text rendering ---------------------------------------------------------

def render_report(report: DistributionReport) -> str:
    """Aligned plain-text table, one block per dimension."""
    if not report.rows:
        return "(empty report)\n"
    lines = []
    width = max(len(f"{r.dimension}/{r.option}") for r in report.rows)
    current = None
    for row in report.rows:
        if row.dimension != current:
            if current is not None:
                lines.append("")
            lines.append(row.dimension)
            current = row.dimension
        label = row.option.ljust(width)
        lines.append(f"  {label}  {row.count:>4}  {row.percent:>6.1f}%")
    lines.append("")
    lines.append(f"denominator: {report.denominator}")
    return "\n".join(lines) + "\n"


def render_trend(points: list[TrendPoint]) -> str:
    if not points:
        return "(no customized sessions)\n"
    lines = ["day  date        n     mean     sd"]
    for p in points:
        lines.append(
            f"{p.day:>3}  {p.date}  {p.n:>3}  {p.mean:>7.1f}  {p.sd:>5.1f}"
        )
    return "\n".join(lines) + "\n"
