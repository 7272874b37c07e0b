"""Synthetic decoded-bundle fixtures with labeled ground truth.

A fixture spec describes audio segments (speech-like, tone, noise,
silence) and visual shots on a timeline; synthesis writes a complete
decoded bundle plus a ground-truth file with the intended speech
intervals and scene cuts. The speech-like signal is band-limited noise
with syllable-rate amplitude modulation, which the built-in detector
recognizes and a steady tone does not.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

import numpy as np

from .ingest import AUDIO_FILE, ASSET_MANIFEST, FRAMES_MANIFEST, write_pgm, write_wav
from .pipeline import GROUND_TRUTH_FILE

AUDIO_KINDS = ("speech", "tone", "noise", "silence")
SHOT_KINDS = ("solid", "gradient")

FRAME_W, FRAME_H = 64, 48

SPEECH_BAND_HZ = (300.0, 3000.0)
SPEECH_MOD_HZ = 3.0


def validate_fixture_spec(spec: dict) -> dict:
    """Normalize and cross-check a fixture spec; ValueError when inconsistent."""
    if not isinstance(spec, dict):
        raise ValueError("fixture spec must be a mapping")
    duration = float(spec.get("duration_s", 0))
    if not 0 < duration <= 600:
        raise ValueError(f"duration_s must be in (0, 600], got {duration}")
    rate = int(spec.get("sample_rate_hz", 16000))
    if rate not in (8000, 16000, 44100, 48000):
        raise ValueError(f"unsupported sample_rate_hz {rate}")
    seed = int(spec.get("seed", 0))
    fps = float(spec.get("fps", 1.0))
    if not 0.2 <= fps <= 10:
        raise ValueError(f"fps must be in [0.2, 10], got {fps}")

    audio = []
    cursor = -1.0
    for seg in spec.get("audio", ()):
        kind = seg.get("kind")
        if kind not in AUDIO_KINDS:
            raise ValueError(f"unknown audio kind {kind!r}")
        start, end = float(seg["start_s"]), float(seg["end_s"])
        if not 0 <= start < end <= duration + 1e-9:
            raise ValueError(
                f"audio segment [{start}, {end}) outside [0, {duration}]"
            )
        if start < cursor - 1e-9:
            raise ValueError("audio segments overlap or are unsorted")
        cursor = end
        audio.append(
            {
                "kind": kind,
                "start_s": start,
                "end_s": end,
                "freq_hz": float(seg.get("freq_hz", 440.0)),
                "amplitude": float(seg.get("amplitude", 0.3)),
            }
        )

    shots = []
    cursor = 0.0
    raw_shots = spec.get("shots") or [
        {"start_s": 0.0, "end_s": duration, "kind": "solid", "level": 128}
    ]
    for shot in raw_shots:
        kind = shot.get("kind", "solid")
        if kind not in SHOT_KINDS:
            raise ValueError(f"unknown shot kind {kind!r}")
        start, end = float(shot["start_s"]), float(shot["end_s"])
        if abs(start - cursor) > 1e-9:
            raise ValueError(
                f"shots must tile the timeline; gap or overlap at {start}"
            )
        if end <= start or end > duration + 1e-9:
            raise ValueError(f"bad shot span [{start}, {end})")
        cursor = end
        shots.append(
            {
                "kind": kind,
                "start_s": start,
                "end_s": end,
                "level": int(shot.get("level", 128)),
                "slope_per_s": float(shot.get("slope_per_s", 0.0)),
            }
        )
    if abs(cursor - duration) > 1e-9:
        raise ValueError(f"shots end at {cursor}, not at duration {duration}")

    return {
        "duration_s": duration,
        "sample_rate_hz": rate,
        "seed": seed,
        "fps": fps,
        "audio": audio,
        "shots": shots,
    }


def _band_noise(n: int, rate: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-RMS noise band-limited to the speech band."""
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / rate)
    mask = (freqs >= SPEECH_BAND_HZ[0]) & (freqs <= SPEECH_BAND_HZ[1])
    spectrum[~mask] = 0
    shaped = np.fft.irfft(spectrum, n)
    rms = math.sqrt(float(np.mean(shaped**2))) or 1.0
    return shaped / rms


def synthesize_audio(spec: dict) -> np.ndarray:
    rate = spec["sample_rate_hz"]
    n_total = int(round(spec["duration_s"] * rate))
    out = np.zeros(n_total)
    for i, seg in enumerate(spec["audio"]):
        a = int(round(seg["start_s"] * rate))
        b = min(n_total, int(round(seg["end_s"] * rate)))
        if b <= a:
            continue
        n = b - a
        t = np.arange(n) / rate
        kind = seg["kind"]
        if kind == "silence":
            continue
        if kind == "tone":
            out[a:b] = seg["amplitude"] * np.sin(2 * np.pi * seg["freq_hz"] * t)
        elif kind == "noise":
            rng = np.random.default_rng(spec["seed"] * 1000 + i)
            out[a:b] = seg["amplitude"] * rng.standard_normal(n) * 0.5
        else:  # speech-like
            rng = np.random.default_rng(spec["seed"] * 1000 + i)
            carrier = _band_noise(n, rate, rng)
            envelope = 0.15 + 0.85 * (0.5 * (1 + np.sin(2 * np.pi * SPEECH_MOD_HZ * t)))
            out[a:b] = seg["amplitude"] * carrier * envelope * 0.5
    return np.clip(out, -0.99, 0.99)


def _shot_at(shots: list[dict], t: float) -> dict:
    for shot in shots:
        if shot["start_s"] <= t < shot["end_s"]:
            return shot
    return shots[-1]


def render_frame(shot: dict, t: float) -> np.ndarray:
    if shot["kind"] == "solid":
        return np.full((FRAME_H, FRAME_W), shot["level"], dtype=np.uint8)
    # gradient: a horizontal intensity ramp drifting with time; histogram
    # mass spreads over many bins so slow drift moves little of it per step
    base = shot["level"] + shot["slope_per_s"] * (t - shot["start_s"])
    ramp = base + np.arange(FRAME_W) - FRAME_W // 2
    row = np.clip(ramp, 0, 255).astype(np.uint8)
    return np.tile(row, (FRAME_H, 1))


def synthesize_fixture(spec: dict, out_dir: str | Path) -> Path:
    """Write the full decoded bundle for a fixture spec; returns its path."""
    spec = validate_fixture_spec(spec)
    bundle = Path(out_dir)
    frames_dir = bundle / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    samples = synthesize_audio(spec)
    write_wav(bundle / AUDIO_FILE, samples, spec["sample_rate_hz"])

    duration = spec["duration_s"]
    period = 1.0 / spec["fps"]
    n_frames = int(math.floor(duration / period + 1e-9)) + 1
    entries = []
    for k in range(n_frames):
        t = min(k * period, duration)
        shot = _shot_at(spec["shots"], t)
        name = f"frames/f{k:05d}.pgm"
        write_pgm(bundle / name, render_frame(shot, t))
        entries.append({"t_s": t, "file": name})
    (bundle / FRAMES_MANIFEST).write_text(
        json.dumps({"frames": entries}, indent=2) + "\n", "utf-8"
    )

    (bundle / ASSET_MANIFEST).write_text(
        json.dumps(
            {
                "duration_s": duration,
                "width_px": FRAME_W,
                "height_px": FRAME_H,
                "has_audio": True,
            },
            indent=2,
        )
        + "\n",
        "utf-8",
    )

    speech = [
        [seg["start_s"], seg["end_s"]]
        for seg in spec["audio"]
        if seg["kind"] == "speech"
    ]
    cuts = [shot["start_s"] for shot in spec["shots"][1:]]
    (bundle / GROUND_TRUTH_FILE).write_text(
        json.dumps({"speech": speech, "scene_cuts": cuts}, indent=2) + "\n",
        "utf-8",
    )
    (bundle / "fixture_spec.json").write_text(
        json.dumps(spec, indent=2) + "\n", "utf-8"
    )
    return bundle


def layout_signals(spec: dict):
    """Ground-truth timing signals straight from a validated spec.

    Returns (silence, speech, scenes, duration_s) as the detectors would
    ideally report them: quiet time is the silence segments plus every gap
    between segments, speech is the speech segments, and each shot
    boundary is a full-distance cut.
    """
    from .timing import IntervalSet, SceneChangeList, SilenceConfig

    spec = validate_fixture_spec(spec)
    duration = spec["duration_s"]
    loud = [
        (seg["start_s"], seg["end_s"])
        for seg in spec["audio"]
        if seg["kind"] in ("speech", "tone", "noise")
    ]
    min_len = SilenceConfig().min_len_s
    quiet = [
        (s, e)
        for s, e in IntervalSet.build(loud).complement(duration)
        if e - s >= min_len
    ]
    silence = IntervalSet.build(quiet)
    speech = IntervalSet.build(
        (seg["start_s"], seg["end_s"])
        for seg in spec["audio"]
        if seg["kind"] == "speech"
    )
    cuts = tuple(shot["start_s"] for shot in spec["shots"][1:])
    scenes = SceneChangeList(timestamps=cuts, scores=(2.0,) * len(cuts))
    return silence, speech, scenes, duration


def random_fixture_spec(rng: random.Random, max_duration_s: float = 60.0) -> dict:
    """Random legal timeline: mixed audio segments, occasional shot cuts."""
    duration = round(rng.uniform(5.0, max_duration_s), 2)
    audio = []
    cursor = 0.0
    while cursor < duration - 0.5:
        kind = rng.choices(
            ("speech", "silence", "tone", "noise"),
            weights=(5, 4, 1, 1),
        )[0]
        length = rng.uniform(0.4, 6.0)
        end = min(round(cursor + length, 2), duration)
        if end - cursor >= 0.2:
            audio.append(
                {"kind": kind, "start_s": round(cursor, 2), "end_s": end}
            )
        cursor = end + round(rng.uniform(0.0, 1.5), 2)

    shots = []
    cursor = 0.0
    levels = [16, 80, 160, 240]
    i = 0
    while cursor < duration:
        end = min(round(cursor + rng.uniform(3.0, 15.0), 2), duration)
        if duration - end < 1.0:
            end = duration
        shots.append(
            {
                "kind": "solid",
                "start_s": cursor,
                "end_s": end,
                "level": levels[i % len(levels)],
            }
        )
        cursor = end
        i += 1

    return {
        "duration_s": duration,
        "sample_rate_hz": 16000,
        "seed": rng.randrange(1_000_000),
        "fps": 1.0,
        "audio": audio,
        "shots": shots,
    }
