import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from audiodesc.customization import DEFAULT_SETTINGS, validate
from audiodesc.errors import UnsupportedFormat
from audiodesc.gateway import DescriptionItem, VideoMetadata
from audiodesc.timing import PlannedPoint, TimestampPlan
from audiodesc.track import (
    ADTrack,
    Cue,
    FLAG_EMPTY_TRACK,
    from_metadata,
    parse_track,
    schedule,
    serialize,
    track_from_dict,
    track_to_dict,
)


def plan_of(*times):
    return TimestampPlan(
        points=tuple(
            PlannedPoint(t, 0.0, frozenset({"synthetic"})) for t in times
        ),
        frequency_s=15,
        duration_s=(max(times) + 10.0) if times else 10.0,
    )


def make_track(cue_specs, settings=DEFAULT_SETTINGS, flags=()):
    cues = tuple(
        Cue(start_s=t, text=text, word_count=len(text.split()))
        for t, text in cue_specs
    )
    return ADTrack(
        video_id="vid-1",
        cues=cues,
        settings_snapshot=settings,
        plan_snapshot=plan_of(*(t for t, _ in cue_specs)),
        flags=tuple(flags),
    )


class TestCue:
    def test_word_count_checked(self):
        Cue(start_s=0.0, text="Kate embraces Kevin tightly", word_count=4)
        with pytest.raises(ValueError):
            Cue(start_s=0.0, text="Kate embraces Kevin tightly", word_count=5)

    def test_track_requires_increasing_starts(self):
        with pytest.raises(ValueError):
            make_track([(5.0, "one cue"), (5.0, "same start")])
        with pytest.raises(ValueError):
            make_track([(5.0, "one cue"), (3.0, "goes backward")])


class TestFromMetadata:
    def test_cues_carry_text_and_flags(self):
        meta = VideoMetadata(
            video_id="v9",
            descriptions=(
                DescriptionItem(0.0, "A dark stage.", ()),
                DescriptionItem(7.0, "Lights rise slowly.", ("word_count_low",)),
            ),
        )
        track = from_metadata(meta, DEFAULT_SETTINGS, plan_of(0.0, 7.0))
        assert track.video_id == "v9"
        assert [c.text for c in track.cues] == [
            "A dark stage.",
            "Lights rise slowly.",
        ]
        assert track.cues[0].word_count == 3
        assert track.cues[1].flags == ("word_count_low",)
        assert track.flags == ()

    def test_empty_metadata_is_flagged_empty_track(self):
        meta = VideoMetadata(video_id="v0", descriptions=())
        track = from_metadata(meta, DEFAULT_SETTINGS, plan_of())
        assert track.cues == ()
        assert FLAG_EMPTY_TRACK in track.flags

    def test_generation_flags_propagate(self):
        meta = VideoMetadata(
            video_id="v1",
            descriptions=(DescriptionItem(0.0, "A word.", ()),),
            flags=("repair_attempted",),
        )
        track = from_metadata(meta, DEFAULT_SETTINGS, plan_of(0.0))
        assert track.flags == ("repair_attempted",)


class TestSchedule:
    def test_estimated_end_from_word_count(self):
        text = " ".join(["word"] * 10)
        track = make_track([(5.0, text)])
        sched = schedule(track, 2.5)
        assert sched.items[0].start_s == 5.0
        assert sched.items[0].est_end_s == pytest.approx(9.0)
        assert not sched.items[0].overlap

    def test_overlap_marked_against_next_cue(self):
        long_text = " ".join(["w"] * 25)  # 10 s at 2.5 wps
        track = make_track([(0.0, long_text), (8.0, "short tail")])
        sched = schedule(track)
        assert sched.items[0].overlap
        assert not sched.items[1].overlap

    def test_last_cue_never_overlaps(self):
        track = make_track([(0.0, " ".join(["w"] * 200))])
        assert not schedule(track).items[0].overlap

    def test_rate_bounds(self):
        track = make_track([(0.0, "hi there")])
        for bad in (0.5, 6.5, 0.0):
            with pytest.raises(ValueError):
                schedule(track, bad)

    def test_faster_rate_never_creates_overlap(self):
        cues = [(0.0, " ".join(["w"] * 30)), (9.0, "short"), (20.0, "tail x")]
        track = make_track(cues)
        slow = schedule(track, 2.0)
        fast = schedule(track, 5.0)
        for s_item, f_item in zip(slow.items, fast.items):
            if not s_item.overlap:
                assert not f_item.overlap
            assert f_item.est_end_s <= s_item.est_end_s

    @given(st.floats(min_value=1.0, max_value=6.0))
    def test_overlap_matches_brute_force(self, rate):
        track = make_track(
            [(0.0, " ".join(["w"] * 12)), (4.0, "a b c"), (6.0, "z")]
        )
        sched = schedule(track, rate)
        for i, item in enumerate(sched.items):
            expected_end = track.cues[i].start_s + track.cues[i].word_count / rate
            assert item.est_end_s == pytest.approx(expected_end)
            if i + 1 < len(track.cues):
                assert item.overlap == (
                    expected_end > track.cues[i + 1].start_s
                )


class TestSerialization:
    def test_structured_round_trip(self):
        track = make_track(
            [(0.0, "A tailor threads a needle."), (7.0, "She looks up.")],
            settings=validate({"emphasis": "character", "frequency_s": 8}),
            flags=("repair_attempted",),
        )
        data = serialize(track, "structured")
        assert parse_track(data) == track

    def test_structured_is_stable_bytes(self):
        track = make_track([(0.0, "Same track.")])
        assert serialize(track) == serialize(track)

    def test_structured_is_sorted_json(self):
        track = make_track([(0.0, "One cue here.")])
        doc = json.loads(serialize(track))
        assert list(doc) == sorted(doc)
        assert doc["format_version"] == 1

    def test_vtt_output(self):
        track = make_track([(0.0, "A  spaced   out\ncue"), (8.0, "Tail.")])
        text = serialize(track, "vtt").decode()
        assert text.startswith("WEBVTT\n")
        # 4 words at 2.5 wps -> 1.6 s
        assert "00:00:00.000 --> 00:00:01.600" in text
        assert "A spaced out cue" in text
        assert "00:00:08.000 --> 00:00:08.400" in text

    def test_vtt_empty_track_is_header_only(self):
        meta = VideoMetadata(video_id="v0", descriptions=())
        track = from_metadata(meta, DEFAULT_SETTINGS, plan_of())
        assert serialize(track, "vtt").decode() == "WEBVTT\n"

    def test_unknown_format(self):
        track = make_track([(0.0, "hello world")])
        with pytest.raises(UnsupportedFormat):
            serialize(track, "srt")

    def test_parse_rejects_garbage(self):
        with pytest.raises(UnsupportedFormat):
            parse_track(b"\xff\xfe not json")
        with pytest.raises(UnsupportedFormat):
            parse_track(b"[1, 2]")

    def test_version_gate(self):
        track = make_track([(0.0, "versioned cue")])
        doc = track_to_dict(track)
        doc["format_version"] = 2
        with pytest.raises(UnsupportedFormat):
            track_from_dict(doc)

    def test_settings_snapshot_revalidated(self):
        track = make_track([(0.0, "a cue")])
        doc = track_to_dict(track)
        doc["settings"]["target_length_words"] = 7  # below the legal floor
        from audiodesc.errors import SettingsError

        with pytest.raises(SettingsError):
            track_from_dict(doc)
