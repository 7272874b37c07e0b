"""Insertion-point timing: silence, speech, and scene-change analysis.

Three signals are computed per video: low-energy (silent) intervals, speech
intervals from a pluggable detector, and shot cuts from frame-histogram
distance. They fuse into scored candidate points (2 when a pause and a cut
coincide, 1 otherwise), and the planner recursively splits any span longer
than the user-selected frequency, never placing a point inside speech.
"""

from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass

import numpy as np

from .errors import DetectorFailure, EmptyAudio, TooFewFrames
from .ingest import AudioTrack, FrameSample

SILENCE = "silence"
NO_SPEECH = "no_speech"
SCENE_CHANGE = "scene_change"
SYNTHETIC = "synthetic"
OPENING = "opening"

FREQUENCY_CHOICES = (8, 15, 30)
ADJUST_EPSILON_S = 0.01
# Granularity at which "a legal insertion point exists" is decided, matching
# the feasibility scan used to audit plans.
LEGAL_GRID_S = 0.01

_T_EPS = 1e-9


class IntervalSet:
    """Ordered, non-overlapping half-open [start, end) intervals in seconds."""

    __slots__ = ("_pairs",)

    def __init__(self, pairs: tuple[tuple[float, float], ...]):
        self._pairs = pairs

    @classmethod
    def build(cls, raw, merge_gap_s: float = 0.0) -> "IntervalSet":
        """Sort, validate, and canonicalize raw (start, end) pairs.

        Overlapping intervals and gaps smaller than `merge_gap_s` are merged.
        """
        cleaned = []
        for start, end in raw:
            start = float(start)
            end = float(end)
            if not (math.isfinite(start) and math.isfinite(end)):
                raise ValueError(f"non-finite interval ({start}, {end})")
            if start < 0:
                raise ValueError(f"interval start {start} is negative")
            if end <= start:
                raise ValueError(f"interval ({start}, {end}) has no width")
            cleaned.append((start, end))
        cleaned.sort()
        merged: list[list[float]] = []
        for start, end in cleaned:
            if merged and start - merged[-1][1] < merge_gap_s + _T_EPS:
                merged[-1][1] = max(merged[-1][1], end)
            else:
                merged.append([start, end])
        return cls(tuple((s, e) for s, e in merged))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @property
    def pairs(self) -> tuple[tuple[float, float], ...]:
        return self._pairs

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self):
        return iter(self._pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        body = ", ".join(f"[{s:g}, {e:g})" for s, e in self._pairs)
        return f"IntervalSet({body})"

    def is_empty(self) -> bool:
        return not self._pairs

    def total_s(self) -> float:
        return sum(e - s for s, e in self._pairs)

    def contains(self, t_s: float) -> bool:
        return self.covering(t_s) is not None

    def covering(self, t_s: float) -> tuple[float, float] | None:
        for start, end in self._pairs:
            if start <= t_s < end:
                return (start, end)
            if start > t_s:
                break
        return None

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a_start, a_end in self._pairs:
            for b_start, b_end in other._pairs:
                lo = max(a_start, b_start)
                hi = min(a_end, b_end)
                if hi > lo:
                    out.append((lo, hi))
        return IntervalSet.build(out)

    def complement(self, duration_s: float) -> "IntervalSet":
        out = []
        cursor = 0.0
        for start, end in self._pairs:
            if start > cursor + _T_EPS:
                out.append((cursor, min(start, duration_s)))
            cursor = max(cursor, end)
            if cursor >= duration_s:
                break
        if cursor < duration_s - _T_EPS:
            out.append((cursor, duration_s))
        return IntervalSet.build(out)

    def clipped(self, duration_s: float) -> "IntervalSet":
        out = [
            (s, min(e, duration_s))
            for s, e in self._pairs
            if s < duration_s - _T_EPS
        ]
        return IntervalSet.build(out)


@dataclass(frozen=True)
class SceneChangeList:
    timestamps: tuple[float, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.timestamps) != len(self.scores):
            raise ValueError("timestamps and scores must align")
        if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise ValueError("scene-change timestamps must strictly increase")


@dataclass(frozen=True)
class CandidatePoint:
    t_s: float
    score: float
    provenance: frozenset[str]


@dataclass(frozen=True)
class PlannedPoint:
    t_s: float
    score: float
    provenance: frozenset[str]


@dataclass(frozen=True)
class TimestampPlan:
    points: tuple[PlannedPoint, ...]
    frequency_s: int
    duration_s: float
    flags: tuple[str, ...] = ()

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(p.t_s for p in self.points)

    def to_dict(self) -> dict:
        return {
            "points": [
                {
                    "t_s": p.t_s,
                    "score": p.score,
                    "provenance": sorted(p.provenance),
                }
                for p in self.points
            ],
            "frequency_s": self.frequency_s,
            "duration_s": self.duration_s,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TimestampPlan":
        return cls(
            points=tuple(
                PlannedPoint(
                    t_s=float(p["t_s"]),
                    score=float(p["score"]),
                    provenance=frozenset(p["provenance"]),
                )
                for p in doc["points"]
            ),
            frequency_s=int(doc["frequency_s"]),
            duration_s=float(doc["duration_s"]),
            flags=tuple(doc.get("flags", ())),
        )


# --- silence ----------------------------------------------------------------

@dataclass
class SilenceConfig:
    window_s: float = 0.05
    threshold_dbfs: float = -40.0
    min_len_s: float = 0.3


def detect_silence(audio: AudioTrack, cfg: SilenceConfig | None = None) -> IntervalSet:
    """Windows whose RMS sits below the dBFS threshold, merged canonically.

    Raises:
        EmptyAudio: the track has zero samples.
    """
    cfg = cfg or SilenceConfig()
    if cfg.window_s <= 0:
        raise ValueError("window_s must be positive")
    if cfg.threshold_dbfs >= 0:
        raise ValueError("threshold_dbfs must be negative")
    samples = np.asarray(audio.samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptyAudio("audio track has no samples")

    win = max(1, int(round(cfg.window_s * audio.sample_rate_hz)))
    n_win = int(math.ceil(samples.size / win))
    padded = np.zeros(n_win * win)
    padded[: samples.size] = samples
    rms = np.sqrt((padded.reshape(n_win, win) ** 2).mean(axis=1))
    # trailing partial window: rescale RMS to its real length
    tail = samples.size - (n_win - 1) * win
    if tail != win:
        rms[-1] = math.sqrt(float(np.sum(samples[(n_win - 1) * win :] ** 2)) / tail)
    dbfs = 20.0 * np.log10(np.maximum(rms, 1e-12))
    quiet = dbfs < cfg.threshold_dbfs

    intervals = []
    start = None
    for k, flag in enumerate(quiet):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            intervals.append((start * cfg.window_s, k * cfg.window_s))
            start = None
    if start is not None:
        intervals.append((start * cfg.window_s, audio.duration_s))
    intervals = [
        (s, min(e, audio.duration_s)) for s, e in intervals if s < audio.duration_s
    ]
    merged = IntervalSet.build(intervals, merge_gap_s=cfg.window_s)
    kept = [(s, e) for s, e in merged if e - s >= cfg.min_len_s - _T_EPS]
    return IntervalSet.build(kept)


# --- speech -----------------------------------------------------------------

class SpeechDetector:
    """Contract: detect(audio) -> IntervalSet of speech within the track."""

    def detect(self, audio: AudioTrack) -> IntervalSet:  # pragma: no cover
        raise NotImplementedError


class EnergyModulationDetector(SpeechDetector):
    """Built-in heuristic: speech-band energy with syllabic-rate modulation.

    A window counts as speech when it is loud enough, most of its energy
    sits in the 300-3000 Hz band, and the band-energy envelope around it is
    modulated (steady tones and constant noise floors are not). A real VAD
    can be plugged in via `CommandDetector`; this one exists so the pipeline
    has zero model dependencies.
    """

    def __init__(
        self,
        window_s: float = 0.05,
        energy_floor_dbfs: float = -45.0,
        band_hz: tuple[float, float] = (300.0, 3000.0),
        band_ratio_min: float = 0.5,
        modulation_min: float = 0.25,
        modulation_context_windows: int = 6,
        min_len_s: float = 0.15,
    ):
        self.window_s = window_s
        self.energy_floor_dbfs = energy_floor_dbfs
        self.band_hz = band_hz
        self.band_ratio_min = band_ratio_min
        self.modulation_min = modulation_min
        self.modulation_context_windows = modulation_context_windows
        self.min_len_s = min_len_s

    def detect(self, audio: AudioTrack) -> IntervalSet:
        samples = np.asarray(audio.samples, dtype=np.float64)
        if samples.size == 0:
            return IntervalSet.empty()
        win = max(8, int(round(self.window_s * audio.sample_rate_hz)))
        n_win = samples.size // win
        if n_win == 0:
            return IntervalSet.empty()
        frames = samples[: n_win * win].reshape(n_win, win)

        rms = np.sqrt((frames**2).mean(axis=1))
        dbfs = 20.0 * np.log10(np.maximum(rms, 1e-12))

        spectrum = np.abs(np.fft.rfft(frames, axis=1)) ** 2
        freqs = np.fft.rfftfreq(win, d=1.0 / audio.sample_rate_hz)
        band = (freqs >= self.band_hz[0]) & (freqs <= self.band_hz[1])
        total_energy = spectrum[:, 1:].sum(axis=1)  # skip DC
        band_energy = spectrum[:, band].sum(axis=1)
        ratio = band_energy / np.maximum(total_energy, 1e-20)

        ctx = self.modulation_context_windows
        modulation = np.zeros(n_win)
        for k in range(n_win):
            lo = max(0, k - ctx)
            hi = min(n_win, k + ctx + 1)
            window = band_energy[lo:hi]
            mean = window.mean()
            modulation[k] = window.std() / mean if mean > 1e-20 else 0.0

        speechy = (
            (dbfs > self.energy_floor_dbfs)
            & (ratio > self.band_ratio_min)
            & (modulation > self.modulation_min)
        )

        intervals = []
        start = None
        for k, flag in enumerate(speechy):
            if flag and start is None:
                start = k
            elif not flag and start is not None:
                intervals.append((start * self.window_s, k * self.window_s))
                start = None
        if start is not None:
            intervals.append((start * self.window_s, audio.duration_s))
        merged = IntervalSet.build(intervals, merge_gap_s=2 * self.window_s)
        kept = [(s, e) for s, e in merged if e - s >= self.min_len_s]
        return IntervalSet.build(kept).clipped(audio.duration_s)


class CommandDetector(SpeechDetector):
    """External detector invoked as a command; reads JSON [[start, end], ...].

    The command template may carry a {rate} placeholder; raw PCM16 samples
    are piped to stdin.
    """

    def __init__(self, cmd_template: str, timeout_s: float = 120.0):
        self.cmd_template = cmd_template
        self.timeout_s = timeout_s

    def detect(self, audio: AudioTrack) -> IntervalSet:
        argv = [
            token.replace("{rate}", str(audio.sample_rate_hz))
            for token in self.cmd_template.split()
        ]
        pcm = (np.clip(audio.samples, -1, 1) * 32767).astype("<i2").tobytes()
        try:
            proc = subprocess.run(
                argv,
                input=pcm,
                capture_output=True,
                timeout=self.timeout_s,
            )
        except (FileNotFoundError, subprocess.TimeoutExpired) as exc:
            raise DetectorFailure(f"speech detector failed to run: {exc}") from exc
        if proc.returncode != 0:
            raise DetectorFailure(
                f"speech detector exited {proc.returncode}: "
                f"{proc.stderr.decode(errors='replace')[-300:]}"
            )
        try:
            pairs = json.loads(proc.stdout.decode())
            result = IntervalSet.build(pairs)
        except (ValueError, TypeError) as exc:
            raise DetectorFailure(f"malformed detector output: {exc}") from exc
        return result.clipped(audio.duration_s)


class ManifestDetector(SpeechDetector):
    """Replays labeled speech intervals, e.g. from a fixture's ground truth."""

    def __init__(self, intervals):
        self._intervals = IntervalSet.build(intervals)

    def detect(self, audio: AudioTrack) -> IntervalSet:
        return self._intervals.clipped(audio.duration_s)


def detect_speech(audio: AudioTrack, detector: SpeechDetector) -> IntervalSet:
    """Run the configured detector; complement of the result is no-speech."""
    result = detector.detect(audio)
    if not isinstance(result, IntervalSet):
        raise DetectorFailure(
            f"detector returned {type(result).__name__}, expected IntervalSet"
        )
    return result.clipped(audio.duration_s)


# --- scene changes ----------------------------------------------------------

@dataclass
class SceneConfig:
    threshold: float = 0.3
    bins: int = 64


def frame_histogram(pixels: np.ndarray, bins: int = 64) -> np.ndarray:
    """Normalized grayscale intensity histogram (sums to 1)."""
    hist, _ = np.histogram(pixels, bins=bins, range=(0, 256))
    return hist / max(1, pixels.size)


def detect_scene_changes(
    frames: list[FrameSample], cfg: SceneConfig | None = None
) -> SceneChangeList:
    """Cuts where consecutive-frame histogram L1 distance meets the threshold.

    The cut is reported at the *later* frame's timestamp with the distance
    as its score (range [0, 2]).

    Raises:
        TooFewFrames: fewer than two frames were provided.
    """
    cfg = cfg or SceneConfig()
    if not 0 < cfg.threshold <= 2:
        raise ValueError(f"threshold must be in (0, 2], got {cfg.threshold}")
    if len(frames) < 2:
        raise TooFewFrames(f"need at least 2 frames, got {len(frames)}")

    timestamps = []
    scores = []
    prev = frame_histogram(frames[0].pixels, cfg.bins)
    for frame in frames[1:]:
        cur = frame_histogram(frame.pixels, cfg.bins)
        distance = float(np.abs(cur - prev).sum())
        if distance >= cfg.threshold:
            timestamps.append(frame.t_s)
            scores.append(distance)
        prev = cur
    return SceneChangeList(timestamps=tuple(timestamps), scores=tuple(scores))


# --- fusion -----------------------------------------------------------------

@dataclass
class FuseConfig:
    duration_s: float
    coincidence_s: float = 0.5
    pause_score: float = 1.0
    coincident_score: float = 2.0


def _distance_to_interval(t_s: float, interval: tuple[float, float]) -> float:
    start, end = interval
    if t_s < start:
        return start - t_s
    if t_s > end:
        return t_s - end
    return 0.0


def fuse_signals(
    silence: IntervalSet,
    speech: IntervalSet,
    scenes: SceneChangeList,
    cfg: FuseConfig,
) -> list[CandidatePoint]:
    """Fuse the three signals into scored candidates outside speech.

    Pauses (silence within no-speech) contribute their start points; scene
    changes in no-speech contribute their cut times. A cut within the
    coincidence window of a pause absorbs the pause's candidate and scores 2.
    """
    duration = cfg.duration_s
    no_speech = speech.complement(duration)
    pauses = silence.intersect(no_speech)

    def outside_speech(t: float) -> bool:
        return 0 <= t <= duration and not speech.contains(t)

    candidates: list[CandidatePoint] = []
    matched_pauses: set[tuple[float, float]] = set()

    for t, base_score in zip(scenes.timestamps, scenes.scores):
        if not outside_speech(t):
            continue
        near = [
            p for p in pauses if _distance_to_interval(t, p) <= cfg.coincidence_s
        ]
        if near:
            matched_pauses.update(near)
            candidates.append(
                CandidatePoint(
                    t_s=t,
                    score=cfg.coincident_score,
                    provenance=frozenset({SCENE_CHANGE, SILENCE, NO_SPEECH}),
                )
            )
        else:
            candidates.append(
                CandidatePoint(
                    t_s=t,
                    score=cfg.pause_score,
                    provenance=frozenset({SCENE_CHANGE, NO_SPEECH}),
                )
            )

    for pause in pauses:
        if pause in matched_pauses:
            continue
        candidates.append(
            CandidatePoint(
                t_s=pause[0],
                score=cfg.pause_score,
                provenance=frozenset({SILENCE, NO_SPEECH}),
            )
        )

    candidates.sort(key=lambda c: c.t_s)
    return candidates


# --- planning ---------------------------------------------------------------

def adjust_to_nonspeech(
    t_s: float, speech: IntervalSet, duration_s: float
) -> float | None:
    """Push a timestamp forward out of speech, 10 ms past the interval end.

    Returns the input unchanged when it is already outside speech, and None
    when no non-speech time exists at or after it within the video.
    """
    if not 0 <= t_s <= duration_s + _T_EPS:
        raise ValueError(f"t_s {t_s} outside [0, {duration_s}]")
    t = t_s
    for _ in range(len(speech) + 1):
        covering = speech.covering(t)
        if covering is None:
            return min(t, duration_s)
        t = covering[1] + ADJUST_EPSILON_S
        if t > duration_s + _T_EPS:
            return None
    return min(t, duration_s)


def _legal_grid_point(
    a: float, b: float, speech: IntervalSet, duration_s: float, target: float
) -> float | None:
    """Nearest non-speech 10 ms grid time strictly inside (a, b), or None."""
    k0 = int(math.floor(a / LEGAL_GRID_S)) + 1
    k1 = int(math.ceil(b / LEGAL_GRID_S)) - 1
    if k1 < k0:
        return None
    times = np.arange(k0, k1 + 1) * LEGAL_GRID_S
    times = times[(times > a + _T_EPS) & (times < b - _T_EPS) & (times <= duration_s)]
    if times.size == 0:
        return None
    mask = np.ones(times.size, dtype=bool)
    for start, end in speech:
        mask &= ~((times >= start) & (times < end))
    legal = times[mask]
    if legal.size == 0:
        return None
    return float(legal[np.argmin(np.abs(legal - target))])


def _pick_candidate(
    inside: list[CandidatePoint], midpoint: float
) -> CandidatePoint:
    return sorted(
        inside, key=lambda c: (-c.score, abs(c.t_s - midpoint), c.t_s)
    )[0]


def plan_timestamps(
    candidates: list[CandidatePoint],
    speech: IntervalSet,
    duration_s: float,
    frequency_s: int,
) -> TimestampPlan:
    """Build the insertion plan by recursive gap splitting.

    Seeds are every score>=2 candidate plus t=0 adjusted out of speech. Any
    gap longer than the frequency takes the best in-gap candidate (highest
    score, then nearest the gap midpoint, then earliest); candidate-free
    gaps take the midpoint adjusted out of speech, falling back to the legal
    time nearest the midpoint. A gap with no legal time inside is left as is.
    """
    if frequency_s not in FREQUENCY_CHOICES:
        raise ValueError(f"frequency_s must be one of {FREQUENCY_CHOICES}")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")

    legal_candidates = [
        c
        for c in candidates
        if 0 <= c.t_s <= duration_s and not speech.contains(c.t_s)
    ]

    points: dict[float, PlannedPoint] = {}
    for c in legal_candidates:
        if c.score >= 2:
            points[c.t_s] = PlannedPoint(c.t_s, c.score, c.provenance)
    opening = adjust_to_nonspeech(0.0, speech, duration_s)
    if opening is not None and opening not in points:
        points[opening] = PlannedPoint(opening, 0.0, frozenset({OPENING}))

    if not points:
        return TimestampPlan(
            points=(),
            frequency_s=frequency_s,
            duration_s=duration_s,
            flags=("no_legal_points",),
        )

    ordered = sorted(points)
    gaps = list(zip(ordered, ordered[1:]))
    gaps.append((ordered[-1], duration_s))

    safety = int(duration_s / LEGAL_GRID_S) + len(legal_candidates) + 64
    while gaps:
        if safety <= 0:
            raise AssertionError("plan recursion exceeded its insertion bound")
        a, b = gaps.pop()
        if b - a <= frequency_s + _T_EPS:
            continue
        midpoint = (a + b) / 2.0
        inside = [
            c for c in legal_candidates if a + _T_EPS < c.t_s < b - _T_EPS
        ]
        if inside:
            chosen = _pick_candidate(inside, midpoint)
            t, score, prov = chosen.t_s, chosen.score, chosen.provenance
        else:
            t = adjust_to_nonspeech(midpoint, speech, duration_s)
            if t is None or not (a + _T_EPS < t < b - _T_EPS):
                t = _legal_grid_point(a, b, speech, duration_s, midpoint)
            score, prov = 0.0, frozenset({SYNTHETIC})
        if t is None or t in points:
            continue
        points[t] = PlannedPoint(t, score, prov)
        safety -= 1
        gaps.append((a, t))
        gaps.append((t, b))

    final = tuple(points[t] for t in sorted(points))
    return TimestampPlan(
        points=final, frequency_s=frequency_s, duration_s=duration_s
    )


# --- plan export ------------------------------------------------------------

def format_vtt_time(t_s: float) -> str:
    ms = int(round(t_s * 1000))
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d}.{ms:03d}"


def plan_to_vtt_slots(plan: TimestampPlan, slot_s: float = 4.0) -> str:
    """Cue-slot export: one empty-payload cue per planned point."""
    lines = ["WEBVTT", ""]
    times = plan.times
    for i, start in enumerate(times):
        end = min(
            start + slot_s,
            plan.duration_s,
            times[i + 1] if i + 1 < len(times) else float("inf"),
        )
        if end <= start:
            end = start + 0.001
        lines.append(f"{format_vtt_time(start)} --> {format_vtt_time(end)}")
        lines.append("")
    return "\n".join(lines) + "\n"
