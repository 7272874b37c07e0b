"""Synthesize a small video fixture and produce a described track for it.

Runs entirely offline: the bundled mock provider answers the generation
prompt deterministically, so the output here is stable run to run.
"""

import tempfile
from pathlib import Path

from audiodesc import pipeline
from audiodesc.customization import validate
from audiodesc.fixtures import synthesize_fixture
from audiodesc.gateway import MockProvider
from audiodesc.ingest import VideoRef
from audiodesc.track import serialize

SPEC = {
    "duration_s": 24.0,
    "sample_rate_hz": 16000,
    "seed": 7,
    "fps": 1.0,
    "audio": [
        {"kind": "speech", "start_s": 2.0, "end_s": 5.0},
        {"kind": "speech", "start_s": 9.0, "end_s": 14.0},
        {"kind": "tone", "start_s": 16.0, "end_s": 18.0},
    ],
    "shots": [
        {"kind": "solid", "start_s": 0.0, "end_s": 7.0, "level": 16},
        {"kind": "solid", "start_s": 7.0, "end_s": 24.0, "level": 240},
    ],
}


def main():
    workdir = Path(tempfile.mkdtemp(prefix="addemo-"))
    bundle = synthesize_fixture(SPEC, workdir / "clip.bundle")
    print(f"fixture bundle: {bundle}")

    settings = validate({"target_length_words": 25, "emphasis": "environment"})
    config = pipeline.PipelineConfig()
    config.ingest.workdir = str(workdir)

    result = pipeline.run(
        VideoRef.local(str(bundle)),
        settings=settings,
        config=config,
        provider=MockProvider(),
    )

    print(f"video id: {result.track.video_id}")
    print(f"planned insertion points: {result.plan.times}")
    print()
    for cue in result.track.cues:
        print(f"  [{cue.start_s:7.3f}] ({cue.word_count} words) {cue.text[:60]}...")
    print()
    print("--- caption export ---")
    print(serialize(result.track, "vtt").decode("utf-8"))


if __name__ == "__main__":
    main()
