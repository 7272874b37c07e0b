"""Record a handful of viewing sessions and print the usage reports.

The journal is plain JSONL; everything here also works against a journal
written by the HTTP service.
"""

import tempfile
from pathlib import Path

from audiodesc.store import (
    SessionStore,
    customization_distribution,
    length_trend,
    question_distribution,
    render_report,
    render_trend,
)

SESSIONS = [
    ("alice", "2026-07-01", {"frequency_s": 8, "target_length_words": 20}),
    ("alice", "2026-07-01", {"emphasis": "character", "target_length_words": 60}),
    ("brook", "2026-07-02", {"frequency_s": 8, "subjectivity": "subjective"}),
    ("brook", "2026-07-03", {"colors": "exclude", "target_length_words": 35}),
    ("chris", "2026-07-03", {"frequency_s": 15, "target_length_words": 30}),
]

QUESTIONS = [
    ("What color is her scarf?", "identify_color", "accurate"),
    ("Describe what is happening now", "describe_scene", None),
    ("How many people are in the room?", "identify_presence", "partially_accurate"),
]


def main():
    journal = Path(tempfile.mkdtemp(prefix="addemo-")) / "journal.jsonl"
    store = SessionStore(journal)

    for i, (user, day, settings) in enumerate(SESSIONS):
        store.record(
            {
                "stream": "session",
                "session_id": f"s{i}",
                "user_id": user,
                "video_id": "vid00000000demo0",
                "started_at": f"{day}T10:00:00+00:00",
                "settings": settings,
            }
        )
    for i, (question, qtype, rating) in enumerate(QUESTIONS):
        event = {
            "stream": "exchange",
            "session_id": "s0",
            "question": question,
            "question_type": qtype,
            "answer": "(answer text)",
        }
        if rating:
            event["accuracy_rating"] = rating
        store.record(event)
    store.record(
        {"stream": "rating", "session_id": "s0", "enjoyment": 5, "immersion": 4}
    )

    log = store.load()
    print(render_report(customization_distribution(log)))
    print(render_report(question_distribution(log)))
    print(render_trend(length_trend(log)))
    print(f"journal at {journal} ({journal.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
