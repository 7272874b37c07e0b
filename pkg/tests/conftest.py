import pytest

from audiodesc import fixtures
from audiodesc.timing import IntervalSet


def iv(*pairs):
    return IntervalSet.build(pairs)


CANONICAL_SPEC = {
    "duration_s": 24.0,
    "sample_rate_hz": 16000,
    "seed": 7,
    "audio": [
        {"kind": "speech", "start_s": 2.0, "end_s": 5.0},
        {"kind": "silence", "start_s": 5.0, "end_s": 9.0},
        {"kind": "speech", "start_s": 9.0, "end_s": 14.0},
        {"kind": "tone", "start_s": 16.0, "end_s": 18.0},
    ],
    "shots": [
        {"kind": "solid", "start_s": 0.0, "end_s": 7.0, "level": 16},
        {"kind": "solid", "start_s": 7.0, "end_s": 24.0, "level": 240},
    ],
}


@pytest.fixture(scope="session")
def canonical_bundle(tmp_path_factory):
    """One fully synthesized fixture bundle shared across the suite."""
    root = tmp_path_factory.mktemp("media")
    return fixtures.synthesize_fixture(CANONICAL_SPEC, root / "clip.bundle")
