"""Resolve video references into local media and pull out audio/frames.

Decoding real containers is delegated to a system-installed tool invoked
through a command template (``ingest.decoder_cmd``); this package never
links a media-decoding library. The decoder's contract is to produce a
*decoded bundle*: a directory holding

    asset.json    {"duration_s": ..., "width_px": ..., "height_px": ..., "has_audio": ...}
    audio.wav     mono PCM16 (absent when the source has no audio stream)
    frames.json   {"frames": [{"t_s": ..., "file": "frames/<name>.pgm"}, ...]}
    frames/*.pgm  grayscale frames (binary portable graymap)

Bundles double as test fixtures, so the whole pipeline runs without any
external tool installed.
"""

from __future__ import annotations

import hashlib
import json
import shlex
import struct
import subprocess
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DecodeFailure,
    UnreachableSource,
    UnsupportedContainer,
    ZeroDuration,
)

ALLOWED_SAMPLE_RATES = (8000, 16000, 44100, 48000)
MAX_FRAME_EDGE_PX = 256
ASSET_MANIFEST = "asset.json"
FRAMES_MANIFEST = "frames.json"
AUDIO_FILE = "audio.wav"

NO_AUDIO_STREAM = "no_audio_stream"


@dataclass(frozen=True)
class VideoRef:
    """Reference to a video: exactly one of local path / URL."""

    path: str | None = None
    url: str | None = None
    resolver_id: str = "default"

    def __post_init__(self):
        if bool(self.path) == bool(self.url):
            raise ValueError("VideoRef needs exactly one of path or url")

    @classmethod
    def local(cls, path: str | Path) -> "VideoRef":
        return cls(path=str(path))

    @classmethod
    def remote(cls, url: str, resolver_id: str = "default") -> "VideoRef":
        return cls(url=url, resolver_id=resolver_id)


@dataclass(frozen=True)
class MediaAsset:
    asset_id: str
    duration_s: float
    container_path: str
    width_px: int
    height_px: int
    has_audio: bool = True

    @property
    def bundle_dir(self) -> Path:
        return Path(self.container_path)


@dataclass(frozen=True)
class AudioTrack:
    sample_rate_hz: int
    samples: np.ndarray
    duration_s: float
    flags: tuple[str, ...] = ()

    @property
    def is_silent_fill(self) -> bool:
        return NO_AUDIO_STREAM in self.flags


@dataclass(frozen=True)
class FrameSample:
    t_s: float
    pixels: np.ndarray
    source_index: int
    path: str = ""


@dataclass
class IngestConfig:
    decoder_cmd: str | None = None
    resolver_cmd: str | None = None
    sample_rate_hz: int = 16000
    frame_period_s: float = 1.0
    workdir: str = "."
    subprocess_timeout_s: float = 600.0
    extra: dict = field(default_factory=dict)


# --- bundle I/O -------------------------------------------------------------

def write_pgm(path: Path, pixels: np.ndarray) -> None:
    """Write a 2D uint8 array as a binary (P5) portable graymap."""
    arr = np.asarray(pixels, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("PGM frames must be 2D grayscale")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + arr.tobytes())


def read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise DecodeFailure(f"not a binary PGM file: {path}")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":  # comment line
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise DecodeFailure(f"bad PGM header in {path}") from exc
    if maxval != 255:
        raise DecodeFailure(f"unsupported PGM maxval {maxval} in {path}")
    body = data[pos : pos + width * height]
    if len(body) != width * height:
        raise DecodeFailure(f"truncated PGM payload in {path}")
    return np.frombuffer(body, dtype=np.uint8).reshape((height, width))


def write_wav(path: Path, samples: np.ndarray, sample_rate_hz: int) -> None:
    """Write float samples in [-1, 1] as mono PCM16."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(sample_rate_hz)
        fh.writeframes(pcm.tobytes())


def read_wav(path: Path) -> tuple[np.ndarray, int]:
    """Read a PCM WAV file into float samples in [-1, 1] (mono mixdown)."""
    try:
        with wave.open(str(path), "rb") as fh:
            n_channels = fh.getnchannels()
            width = fh.getsampwidth()
            rate = fh.getframerate()
            raw = fh.readframes(fh.getnframes())
    except (wave.Error, EOFError, struct.error) as exc:
        raise DecodeFailure(f"unreadable WAV file {path}: {exc}") from exc
    if width != 2:
        raise DecodeFailure(f"only PCM16 WAV is supported, got {8 * width}-bit")
    pcm = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if n_channels > 1:
        pcm = pcm.reshape(-1, n_channels).mean(axis=1)
    return pcm, rate


def is_bundle(path: Path) -> bool:
    return path.is_dir() and (path / ASSET_MANIFEST).is_file()


def _read_bundle_manifest(bundle: Path) -> dict:
    try:
        manifest = json.loads((bundle / ASSET_MANIFEST).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DecodeFailure(f"unreadable bundle manifest in {bundle}: {exc}") from exc
    for key in ("duration_s", "width_px", "height_px"):
        if key not in manifest:
            raise DecodeFailure(f"bundle manifest missing '{key}' in {bundle}")
    return manifest


def _bundle_fingerprint(bundle: Path) -> str:
    """Content hash over the bundle manifests and audio payload.

    Derived from content (not path or mtime) so repeated runs over copies of
    the same fixture produce identical asset ids.
    """
    digest = hashlib.sha256()
    for name in (ASSET_MANIFEST, FRAMES_MANIFEST, AUDIO_FILE):
        member = bundle / name
        if member.is_file():
            digest.update(name.encode())
            digest.update(member.read_bytes())
    return digest.hexdigest()[:16]


# --- command templates ------------------------------------------------------

def _render_cmd(template: str, substitutions: dict[str, str]) -> list[str]:
    tokens = shlex.split(template)
    rendered = []
    for token in tokens:
        for key, value in substitutions.items():
            token = token.replace("{%s}" % key, value)
        rendered.append(token)
    return rendered


def _run_cmd(argv: list[str], timeout_s: float, error_cls, what: str) -> None:
    try:
        proc = subprocess.run(
            argv,
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except FileNotFoundError as exc:
        raise error_cls(f"{what}: command not found: {argv[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise error_cls(f"{what}: timed out after {timeout_s}s") from exc
    if proc.returncode != 0:
        tail = (proc.stderr or proc.stdout or "").strip()[-500:]
        raise error_cls(f"{what}: exit {proc.returncode}: {tail}")


# --- operations -------------------------------------------------------------

def resolve(ref: VideoRef, config: IngestConfig) -> MediaAsset:
    """Turn a video reference into a probed local asset.

    URLs run through the configured resolver command first. Non-bundle local
    files go through the decoder command to produce a decoded bundle; paths
    that already point at a bundle are probed in place.
    """
    if ref.url is not None:
        local = _fetch_url(ref, config)
    else:
        local = Path(ref.path)
        if not local.exists():
            raise UnreachableSource(f"local path does not exist: {local}")

    bundle = local if is_bundle(local) else _decode_to_bundle(local, config)

    manifest = _read_bundle_manifest(bundle)
    duration = float(manifest["duration_s"])
    if duration <= 0:
        raise ZeroDuration(f"asset at {bundle} has duration {duration}")
    return MediaAsset(
        asset_id=_bundle_fingerprint(bundle),
        duration_s=duration,
        container_path=str(bundle),
        width_px=int(manifest["width_px"]),
        height_px=int(manifest["height_px"]),
        has_audio=bool(manifest.get("has_audio", (bundle / AUDIO_FILE).is_file())),
    )


def _fetch_url(ref: VideoRef, config: IngestConfig) -> Path:
    if not config.resolver_cmd:
        raise UnreachableSource(
            f"no resolver command configured for URL source {ref.url!r}"
        )
    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    target = workdir / ("fetch-" + hashlib.sha256(ref.url.encode()).hexdigest()[:12])
    argv = _render_cmd(config.resolver_cmd, {"url": ref.url, "output": str(target)})
    _run_cmd(argv, config.subprocess_timeout_s, UnreachableSource, "resolver")
    if not target.exists():
        raise UnreachableSource(f"resolver produced no output at {target}")
    return target


def _decode_to_bundle(source: Path, config: IngestConfig) -> Path:
    if not config.decoder_cmd:
        raise UnsupportedContainer(
            f"{source} is not a decoded bundle and no decoder command is configured"
        )
    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    out = workdir / (source.stem + ".bundle")
    if is_bundle(out):
        return out  # decode cache hit
    argv = _render_cmd(config.decoder_cmd, {"input": str(source), "output": str(out)})
    _run_cmd(argv, config.subprocess_timeout_s, UnsupportedContainer, "decoder")
    if not is_bundle(out):
        raise UnsupportedContainer(f"decoder did not produce a bundle at {out}")
    return out


def extract_audio(asset: MediaAsset, sample_rate_hz: int) -> AudioTrack:
    """Extract the mono audio track, resampled to the requested rate.

    Assets without an audio stream yield an all-zero track flagged
    ``no_audio_stream`` so downstream timing treats the video as silent.
    """
    if sample_rate_hz not in ALLOWED_SAMPLE_RATES:
        raise ValueError(
            f"sample_rate_hz must be one of {ALLOWED_SAMPLE_RATES}, got {sample_rate_hz}"
        )
    wav_path = asset.bundle_dir / AUDIO_FILE
    if not asset.has_audio or not wav_path.is_file():
        n = int(round(asset.duration_s * sample_rate_hz))
        return AudioTrack(
            sample_rate_hz=sample_rate_hz,
            samples=np.zeros(n, dtype=np.float64),
            duration_s=asset.duration_s,
            flags=(NO_AUDIO_STREAM,),
        )

    samples, native_rate = read_wav(wav_path)
    if native_rate != sample_rate_hz:
        samples = _resample_linear(samples, native_rate, sample_rate_hz)
    duration = len(samples) / sample_rate_hz
    if abs(duration - asset.duration_s) > 0.1:
        raise DecodeFailure(
            f"audio duration {duration:.3f}s deviates from asset "
            f"duration {asset.duration_s:.3f}s by more than 100 ms"
        )
    return AudioTrack(
        sample_rate_hz=sample_rate_hz,
        samples=samples,
        duration_s=duration,
    )


def _resample_linear(samples: np.ndarray, src_rate: int, dst_rate: int) -> np.ndarray:
    if len(samples) == 0:
        return samples
    n_out = int(round(len(samples) * dst_rate / src_rate))
    src_t = np.arange(len(samples)) / src_rate
    dst_t = np.arange(n_out) / dst_rate
    return np.interp(dst_t, src_t, samples)


def sample_frames(asset: MediaAsset, period_s: float) -> list[FrameSample]:
    """Sample grayscale frames on a uniform grid of `period_s` seconds.

    Returns floor(duration/period)+1 frames with t = k * period, each
    downscaled to at most 256 px on the long edge. Pixel data comes from
    the bundle frame nearest to each grid time.
    """
    if not 0.1 <= period_s <= 5.0:
        raise ValueError(f"period_s must be in [0.1, 5.0], got {period_s}")
    bundle = asset.bundle_dir
    try:
        manifest = json.loads((bundle / FRAMES_MANIFEST).read_text("utf-8"))
        entries = manifest["frames"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise DecodeFailure(f"unreadable frames manifest in {bundle}: {exc}") from exc
    if not entries:
        raise DecodeFailure(f"bundle at {bundle} lists no frames")

    source_times = np.array([float(e["t_s"]) for e in entries])
    n_out = int(np.floor(asset.duration_s / period_s + 1e-9)) + 1

    out: list[FrameSample] = []
    cache: dict[int, np.ndarray] = {}
    for k in range(n_out):
        t = k * period_s
        idx = int(np.argmin(np.abs(source_times - t)))
        if idx not in cache:
            cache[idx] = _downscale(read_pgm(bundle / entries[idx]["file"]))
        out.append(
            FrameSample(
                t_s=t,
                pixels=cache[idx],
                source_index=idx,
                path=str(bundle / entries[idx]["file"]),
            )
        )
    return out


def _downscale(pixels: np.ndarray) -> np.ndarray:
    long_edge = max(pixels.shape)
    if long_edge <= MAX_FRAME_EDGE_PX:
        return pixels
    scale = MAX_FRAME_EDGE_PX / long_edge
    h = max(1, int(round(pixels.shape[0] * scale)))
    w = max(1, int(round(pixels.shape[1] * scale)))
    rows = np.linspace(0, pixels.shape[0] - 1, h).round().astype(int)
    cols = np.linspace(0, pixels.shape[1] - 1, w).round().astype(int)
    return pixels[np.ix_(rows, cols)]
