"""Walk through the timing stages on a hand-built layout.

Shows the three signals (silence, speech, scene cuts), the fused candidate
list, and how the plan changes as the requested spacing tightens.
"""

from audiodesc import timing
from audiodesc.fixtures import layout_signals

SPEC = {
    "duration_s": 40.0,
    "audio": [
        {"kind": "speech", "start_s": 1.0, "end_s": 6.5},
        {"kind": "silence", "start_s": 6.5, "end_s": 9.0},
        {"kind": "speech", "start_s": 9.0, "end_s": 17.0},
        {"kind": "noise", "start_s": 20.0, "end_s": 26.0},
        {"kind": "speech", "start_s": 29.0, "end_s": 33.0},
    ],
    "shots": [
        {"kind": "solid", "start_s": 0.0, "end_s": 18.0, "level": 40},
        {"kind": "solid", "start_s": 18.0, "end_s": 27.5, "level": 200},
        {"kind": "solid", "start_s": 27.5, "end_s": 40.0, "level": 90},
    ],
}


def show_intervals(name, intervals):
    spans = ", ".join(f"{s:.2f}-{e:.2f}" for s, e in intervals)
    print(f"  {name:8s} {spans or '(none)'}")


def main():
    silence, speech, scenes, duration = layout_signals(SPEC)
    print(f"layout of a {duration:.0f} s clip")
    show_intervals("silence", silence)
    show_intervals("speech", speech)
    print(f"  cuts     {', '.join(f'{t:.2f}' for t in scenes.timestamps)}")
    print()

    candidates = timing.fuse_signals(
        silence, speech, scenes, timing.FuseConfig(duration_s=duration)
    )
    print("fused candidates (time, score, origin):")
    for c in sorted(candidates, key=lambda c: c.t_s):
        print(f"  {c.t_s:6.2f}  {c.score:.1f}  {'+'.join(sorted(c.provenance))}")
    print()

    for freq in (30, 15, 8):
        plan = timing.plan_timestamps(candidates, speech, duration, freq)
        times = ", ".join(f"{t:.2f}" for t in plan.times)
        print(f"every {freq:2d} s -> {len(plan.points)} points: {times}")


if __name__ == "__main__":
    main()
