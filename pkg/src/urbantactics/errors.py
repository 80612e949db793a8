"""Exception types shared across the pipeline.

Every error raised by the engine derives from :class:`PipelineError`, so
callers (CLI, HTTP layer) can map failures to exit codes / status codes
without caring which stage produced them.
"""


class PipelineError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------

class SchemaError(PipelineError):
    """Malformed input file. ``locus`` names the offending file/record."""

    def __init__(self, message: str, locus: str | None = None):
        super().__init__(message if locus is None else f"{message} ({locus})")
        self.locus = locus


class DuplicateSceneId(SchemaError):
    pass


# --- cooccur --------------------------------------------------------------

class UnknownLabel(PipelineError):
    """A label that is not part of the active vocabulary reached the matrix."""


class VocabMismatch(PipelineError):
    """Two matrices built against different vocabularies cannot be merged."""


# --- recommend ------------------------------------------------------------

class ImageDecodeError(PipelineError):
    pass


class EmptyScene(PipelineError):
    pass


class MissingAnchor(PipelineError):
    """Anchor/co-object pair is unusable (absent from scene or identical)."""


class ProviderError(PipelineError):
    """Transport or auth failure talking to a generative provider."""


class MalformedResponse(PipelineError):
    """Provider output could not be parsed, retries included."""


class TooFewCandidates(PipelineError):
    """Provider kept returning fewer usable rows than requested."""


# --- mesh -----------------------------------------------------------------

class MissingDescription(PipelineError):
    pass


class GenerationFailed(PipelineError):
    pass


class UnsupportedFormat(PipelineError):
    pass


class EmptyMesh(PipelineError):
    pass


class FlatMesh(PipelineError):
    """Mesh has zero bounding-box height and cannot be scaled to a target."""


# --- service --------------------------------------------------------------

class UnknownScene(PipelineError):
    pass


class UnknownSession(PipelineError):
    pass


class InvalidState(PipelineError):
    """Operation not allowed in the session's current state."""


class AnchorNotInScene(PipelineError):
    pass


class NotAnOption(PipelineError):
    pass


class UnknownCandidate(PipelineError):
    pass


class AlreadyDecided(PipelineError):
    pass


class AssetNotReady(PipelineError):
    pass
