"""Prompt assembly for description generation and visual Q&A.

Templates ship as package data and carry placeholder tokens; rendering
substitutes every token and guarantees none survive. Guideline text is
never paraphrased in code, it lives in the template files only.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources

from .customization import CustomizationSettings, to_prompt_params
from .errors import EmptyPlan, EmptyQuestion, UnresolvedPlaceholder

_TEMPLATES = resources.files("audiodesc.templates")

AD_TEMPLATE_NAME = "ad_base_prompt.txt"
VQA_TEMPLATE_NAME = "vqa_prompt.txt"
GUIDELINES_NAME = "general_guidelines.txt"

GUIDELINE_COUNT = 42

# Tokens are replaced literally, spacing quirks included.
TOKEN_GUIDELINES = "{ -- GENERAL_GUIDELINES -- }"
TOKEN_TARGET_LENGTH = "{TARGET_LENGTH }"
TOKEN_EMPHASIS = "{ EMPHASIS_PROMPT }"
TOKEN_SUBJECTIVITY = "{ SUBJECTIVITY_PROMPT }"
TOKEN_COLOR = "{ COLOR_PREFERENCES_PROMPT }"
TOKEN_FREE_FORM = "{ FREE_FORM_GUIDELINES }"
TOKEN_TIMESTAMPS = "{ TIMESTAMPS }"
TOKEN_FRAMES = "{ VIDEO_FRAMES }"

TOKEN_QUESTION = "{ -- QUESTION -- }"
TOKEN_MAIN_FRAME = "{ -- MAIN_VIDEO_FRAME -- }"
TOKEN_ADJACENT_FRAMES = "{ -- ADJACENT_FRAMES -- }"
TOKEN_TRACK_CONTEXT = "{ -- VIDEO_AUDIO_DESCRIPTIONS -- }"

# Inserted where a prompt expects media rather than text; the gateway maps
# these to attachment slots in provider order.
MEDIA_SLOT = "[[media]]"

_PLACEHOLDER_RE = re.compile(r"\{[ \-]*[A-Z_]+[ \-]*\}")


def _read_template(name: str) -> str:
    return (_TEMPLATES / name).read_text(encoding="utf-8")


def template_sha256(name: str) -> str:
    return hashlib.sha256((_TEMPLATES / name).read_bytes()).hexdigest()


@dataclass(frozen=True)
class GuidelineSet:
    """The numbered always-on description guidelines."""

    entries: tuple[str, ...]

    def __post_init__(self):
        if len(self.entries) != GUIDELINE_COUNT:
            raise ValueError(
                f"expected {GUIDELINE_COUNT} guidelines, got {len(self.entries)}"
            )
        for i, entry in enumerate(self.entries, start=1):
            if not entry.startswith(f"{i}. "):
                raise ValueError(f"guideline {i} is misnumbered: {entry[:40]!r}")

    def render(self) -> str:
        return "\n".join(self.entries)

    @classmethod
    def load(cls) -> "GuidelineSet":
        text = _read_template(GUIDELINES_NAME)
        return cls(entries=tuple(line for line in text.splitlines() if line))


@dataclass(frozen=True)
class PromptBundle:
    """A rendered prompt plus the media that fills its slots, in order."""

    text: str
    media_paths: tuple[str, ...]

    def __post_init__(self):
        leftover = _PLACEHOLDER_RE.findall(self.text)
        if leftover:
            raise UnresolvedPlaceholder(
                f"unresolved placeholder(s) in prompt: {leftover[:3]}"
            )
        if self.text.count(MEDIA_SLOT) != len(self.media_paths):
            raise UnresolvedPlaceholder(
                f"prompt has {self.text.count(MEDIA_SLOT)} media slots but "
                f"{len(self.media_paths)} media items"
            )


def format_timestamp_s(t_s: float) -> str:
    return f"{t_s:.3f}"


def build_ad_prompt(
    settings: CustomizationSettings,
    timestamps: tuple[float, ...] | list[float],
    frame_paths: list[str],
) -> PromptBundle:
    """Render the description prompt for one video.

    Raises:
        EmptyPlan: no timestamps were supplied.
        UnresolvedPlaceholder: a template token survived substitution.
    """
    if not timestamps:
        raise EmptyPlan("cannot build a description prompt without timestamps")
    params = to_prompt_params(settings)
    guidelines = GuidelineSet.load()

    text = _read_template(AD_TEMPLATE_NAME)
    text = text.replace(TOKEN_GUIDELINES, guidelines.render())
    text = text.replace(TOKEN_TARGET_LENGTH, str(params.target_length))
    text = text.replace(TOKEN_EMPHASIS, params.emphasis_prompt)
    text = text.replace(TOKEN_SUBJECTIVITY, params.subjectivity_prompt)
    text = text.replace(TOKEN_COLOR, params.color_preferences_prompt)
    text = text.replace(TOKEN_FREE_FORM, params.free_form_guidelines)
    stamp_block = "\n".join(format_timestamp_s(t) for t in timestamps)
    text = text.replace(TOKEN_TIMESTAMPS, stamp_block)
    text = text.replace(TOKEN_FRAMES, "\n".join([MEDIA_SLOT] * len(frame_paths)))

    return PromptBundle(text=text, media_paths=tuple(frame_paths))


def build_vqa_prompt(
    question: str,
    main_frame_path: str,
    adjacent_frame_paths: list[str],
    track_context: str,
) -> PromptBundle:
    """Render the Q&A prompt around one main frame and its neighbors.

    Raises:
        EmptyQuestion: the question is blank.
    """
    if not question or not question.strip():
        raise EmptyQuestion("question text is empty")

    text = _read_template(VQA_TEMPLATE_NAME)
    text = text.replace(TOKEN_QUESTION, question.strip())
    text = text.replace(TOKEN_MAIN_FRAME, MEDIA_SLOT)
    text = text.replace(
        TOKEN_ADJACENT_FRAMES, "\n".join([MEDIA_SLOT] * len(adjacent_frame_paths))
    )
    text = text.replace(TOKEN_TRACK_CONTEXT, track_context or "(no descriptions yet)")

    return PromptBundle(
        text=text, media_paths=(main_frame_path, *adjacent_frame_paths)
    )
