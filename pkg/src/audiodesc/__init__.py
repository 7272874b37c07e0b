"""Customizable audio descriptions for videos, with interactive Q&A.

The pipeline turns a video reference into a timed track of descriptions:
signal analysis finds legal insertion points, user settings shape the
prompt, a multimodal model fills in the text, and the result plays over
the video while viewers ask questions about any moment.
"""

from .customization import (
    CustomizationSettings,
    DEFAULT_SETTINGS,
    validate,
)
from .errors import PipelineError
from .gateway import (
    MockProvider,
    ProviderConfig,
    answer_question,
    generate_descriptions,
)
from .ingest import IngestConfig, MediaAsset, VideoRef
from .pipeline import PipelineConfig, run
from .prompts import build_ad_prompt, build_vqa_prompt
from .store import (
    SessionStore,
    customization_distribution,
    length_trend,
    question_distribution,
)
from .timing import (
    IntervalSet,
    TimestampPlan,
    adjust_to_nonspeech,
    detect_scene_changes,
    detect_silence,
    detect_speech,
    fuse_signals,
    plan_timestamps,
)
from .track import ADTrack, from_metadata, parse_track, schedule, serialize
from .vqa import VQARequest, ask, assemble_context, classify_question

__version__ = "0.1.0"

__all__ = [
    "ADTrack",
    "CustomizationSettings",
    "DEFAULT_SETTINGS",
    "IngestConfig",
    "IntervalSet",
    "MediaAsset",
    "MockProvider",
    "PipelineConfig",
    "PipelineError",
    "ProviderConfig",
    "SessionStore",
    "TimestampPlan",
    "VQARequest",
    "VideoRef",
    "adjust_to_nonspeech",
    "answer_question",
    "ask",
    "assemble_context",
    "build_ad_prompt",
    "build_vqa_prompt",
    "classify_question",
    "customization_distribution",
    "detect_scene_changes",
    "detect_silence",
    "detect_speech",
    "from_metadata",
    "fuse_signals",
    "generate_descriptions",
    "length_trend",
    "parse_track",
    "plan_timestamps",
    "question_distribution",
    "run",
    "schedule",
    "serialize",
    "validate",
    "__version__",
]
