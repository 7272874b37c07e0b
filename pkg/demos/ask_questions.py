"""Interactive Q&A against a paused video, using the offline mock provider.

Builds a fixture, generates its track, then asks a few questions at
different pause points and prints what gets classified and answered.
"""

import tempfile
from pathlib import Path

from audiodesc import pipeline, vqa
from audiodesc.fixtures import synthesize_fixture
from audiodesc.gateway import MockProvider
from audiodesc.ingest import VideoRef, sample_frames
from audiodesc.store import SessionStore

SPEC = {
    "duration_s": 24.0,
    "sample_rate_hz": 16000,
    "seed": 7,
    "audio": [
        {"kind": "speech", "start_s": 2.0, "end_s": 5.0},
        {"kind": "speech", "start_s": 9.0, "end_s": 14.0},
    ],
    "shots": [
        {"kind": "solid", "start_s": 0.0, "end_s": 7.0, "level": 16},
        {"kind": "solid", "start_s": 7.0, "end_s": 24.0, "level": 240},
    ],
}


def main():
    workdir = Path(tempfile.mkdtemp(prefix="addemo-"))
    bundle = synthesize_fixture(SPEC, workdir / "clip.bundle")
    config = pipeline.PipelineConfig()
    config.ingest.workdir = str(workdir)
    provider = MockProvider()

    result = pipeline.run(VideoRef.local(str(bundle)), config=config, provider=provider)
    frames = sample_frames(result.asset, config.ingest.frame_period_s)

    store = SessionStore(workdir / "journal.jsonl")
    store.record(
        {
            "stream": "session",
            "session_id": "demo",
            "user_id": "demo-user",
            "video_id": result.asset.asset_id,
            "started_at": "2026-07-01T10:00:00+00:00",
            "settings": "default",
        }
    )
    deps = vqa.VQADeps(
        asset=result.asset,
        frames=frames,
        track=result.track,
        provider=provider,
        store=store,
        session_id="demo",
    )

    for t_s, question in [
        (3.0, "What color is the background?"),
        (8.0, "Describe what is happening now"),
        (20.0, "How many people are on screen?"),
    ]:
        request = vqa.VQARequest(
            video_id=result.asset.asset_id, t_s=t_s, question=question
        )
        exchange = vqa.ask(request, deps)
        print(f"t={t_s:5.1f}s  [{exchange.question_type}] {question}")
        print(f"         -> {exchange.answer[:70]}")
        print()

    log = store.load()
    print(f"{len(log.all_exchanges())} exchanges journaled at {store.path}")


if __name__ == "__main__":
    main()
