"""User-facing description settings: validation, defaults, prompt parameters.

Six parameters steer generation: insertion frequency, target word count,
emphasis, subjectivity, color preference, and optional free-form guidance.
The default preset (used when a viewer picks nothing) is 15 s / 50 words /
general / objective / colors included / no free-form text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, asdict, replace
from importlib import resources

from .errors import OutOfRange, OversizeGuidelines, UnknownOption

FREQUENCY_CHOICES = (8, 15, 30)
LENGTH_MIN = 15
LENGTH_MAX = 100
EMPHASIS_CHOICES = ("general", "character", "environment", "instructional")
SUBJECTIVITY_CHOICES = ("objective", "subjective")
COLOR_CHOICES = ("include", "exclude")
FREE_FORM_MAX_CHARS = 500

_CONTROL_CHARS = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")


@dataclass(frozen=True)
class CustomizationSettings:
    frequency_s: int = 15
    target_length_words: int = 50
    emphasis: str = "general"
    subjectivity: str = "objective"
    colors: str = "include"
    free_form_guidelines: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def is_default(self) -> bool:
        return self == DEFAULT_SETTINGS


DEFAULT_SETTINGS = CustomizationSettings()

_FIELD_NAMES = frozenset(CustomizationSettings.__dataclass_fields__)


def validate(raw: dict | None) -> CustomizationSettings:
    """Normalize a raw key-value mapping into validated settings.

    Missing keys fall back to the default preset; unknown keys are rejected.

    Raises:
        UnknownOption: unrecognized key or enum value.
        OutOfRange: frequency/length/ratings outside their domains.
        OversizeGuidelines: free-form text longer than 500 characters.
    """
    if raw is None:
        raw = {}
    unknown = set(raw) - _FIELD_NAMES
    if unknown:
        raise UnknownOption(f"unknown settings keys: {sorted(unknown)}")

    merged = {**DEFAULT_SETTINGS.to_dict(), **dict(raw)}

    frequency = _as_int(merged["frequency_s"], "frequency_s")
    if frequency not in FREQUENCY_CHOICES:
        raise OutOfRange(
            f"frequency_s must be one of {FREQUENCY_CHOICES}, got {frequency}"
        )

    length = _as_int(merged["target_length_words"], "target_length_words")
    if not LENGTH_MIN <= length <= LENGTH_MAX:
        raise OutOfRange(
            f"target_length_words must be in [{LENGTH_MIN}, {LENGTH_MAX}], got {length}"
        )

    emphasis = _as_choice(merged["emphasis"], EMPHASIS_CHOICES, "emphasis")
    subjectivity = _as_choice(
        merged["subjectivity"], SUBJECTIVITY_CHOICES, "subjectivity"
    )
    colors = _as_choice(merged["colors"], COLOR_CHOICES, "colors")

    free_form = merged["free_form_guidelines"]
    if free_form is None:
        free_form = ""
    if not isinstance(free_form, str):
        raise UnknownOption("free_form_guidelines must be a string")
    free_form = _CONTROL_CHARS.sub("", free_form)
    if len(free_form) > FREE_FORM_MAX_CHARS:
        raise OversizeGuidelines(
            f"free_form_guidelines is {len(free_form)} chars, cap is {FREE_FORM_MAX_CHARS}"
        )

    return CustomizationSettings(
        frequency_s=frequency,
        target_length_words=length,
        emphasis=emphasis,
        subjectivity=subjectivity,
        colors=colors,
        free_form_guidelines=free_form,
    )


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UnknownOption(f"{name} must be a number, got {value!r}")
    if isinstance(value, float) and not value.is_integer():
        raise OutOfRange(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_choice(value, choices: tuple[str, ...], name: str) -> str:
    if value not in choices:
        raise UnknownOption(f"{name} must be one of {choices}, got {value!r}")
    return value


@dataclass(frozen=True)
class PromptParams:
    """The five substitution strings the AD prompt template consumes."""

    target_length: str
    emphasis_prompt: str
    subjectivity_prompt: str
    color_preferences_prompt: str
    free_form_guidelines: str


def _load_guideline_dict(filename: str) -> dict:
    text = (
        resources.files("audiodesc.templates").joinpath(filename).read_text("utf-8")
    )
    return json.loads(text)


_EMPHASIS_TEXT = _load_guideline_dict("emphasis_guidelines.json")
_SUBJECTIVITY_TEXT = _load_guideline_dict("subjectivity_guidelines.json")
_COLOR_TEXT = _load_guideline_dict("color_preferences_guidelines.json")


def to_prompt_params(settings: CustomizationSettings) -> PromptParams:
    """Map validated settings onto the prompt substitution strings.

    The guideline texts come verbatim from the packaged template
    dictionaries; colors=include maps to the empty string.
    """
    return PromptParams(
        target_length=str(settings.target_length_words),
        emphasis_prompt=_EMPHASIS_TEXT[settings.emphasis],
        subjectivity_prompt=_SUBJECTIVITY_TEXT[settings.subjectivity],
        color_preferences_prompt=_COLOR_TEXT[settings.colors],
        free_form_guidelines=settings.free_form_guidelines,
    )


def with_frequency(settings: CustomizationSettings, frequency_s: int) -> CustomizationSettings:
    """Copy of `settings` with a different insertion frequency."""
    if frequency_s not in FREQUENCY_CHOICES:
        raise OutOfRange(f"frequency_s must be one of {FREQUENCY_CHOICES}")
    return replace(settings, frequency_s=frequency_s)
