"""Exception types raised across the pipeline.

Each stage raises a narrow subclass so callers (CLI, HTTP layer) can map
failures to exit codes / status codes without string matching.
"""


class PipelineError(Exception):
    """Base class for every error raised by this package."""


# --- media ingest ---

class UnreachableSource(PipelineError):
    """The video reference could not be fetched or resolved."""


class UnsupportedContainer(PipelineError):
    """The decoder probe failed or no decoder is configured for the input."""


class ZeroDuration(PipelineError):
    """The resolved asset has no positive duration."""


class DecodeFailure(PipelineError):
    """The decoded media payload is missing or corrupt."""


# --- timing ---

class EmptyAudio(PipelineError):
    """An audio track with zero samples was passed to a detector."""


class DetectorFailure(PipelineError):
    """An external speech detector crashed or emitted malformed output."""


class TooFewFrames(PipelineError):
    """Scene-change detection needs at least two frames."""


class NoLegalPoints(PipelineError):
    """Speech covers the entire video; no insertion point exists."""


# --- customization ---

class SettingsError(PipelineError):
    """Base for customization validation failures."""


class OutOfRange(SettingsError):
    """A numeric setting fell outside its allowed range."""


class UnknownOption(SettingsError):
    """A setting key or enum value is not recognized."""


class OversizeGuidelines(SettingsError):
    """Free-form guideline text exceeds the length cap."""


# --- prompt building ---

class UnresolvedPlaceholder(PipelineError):
    """A template still contains a placeholder after substitution."""


class EmptyPlan(PipelineError):
    """An AD prompt was requested for a plan with no points."""


class EmptyQuestion(PipelineError):
    """A VQA prompt was requested for a blank question."""


# --- model gateway ---

class ProviderError(PipelineError):
    """Transport or auth failure talking to the model endpoint."""


class MalformedOutput(ProviderError):
    """The provider response stayed unparseable after the retry budget."""


class PlanMismatch(ProviderError):
    """Response timestamps could not be mapped onto the plan."""


class EmptyAnswer(ProviderError):
    """The provider returned a blank answer."""


# --- vqa ---

class NoFrames(PipelineError):
    """Context assembly was asked to work with no sampled frames."""


# --- session store ---

class SchemaViolation(PipelineError):
    """An event failed schema validation before persistence."""


class StorageFailure(PipelineError):
    """The journal file could not be written or read back."""


# --- serialization ---

class UnsupportedFormat(PipelineError):
    """An unknown serialization format name was requested."""
