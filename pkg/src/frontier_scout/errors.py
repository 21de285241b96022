"""Exception types shared across the package."""


class InconsistentPoseError(ValueError):
    """Robot pose conflicts with the map (e.g. robot column occupied)."""


class MapParseError(ValueError):
    """Map text is malformed; carries the offending line/column (1-based)."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class NoCandidatesError(RuntimeError):
    """Candidate generation produced an empty set; caller decides fallback."""


class SampleRejectedError(ValueError):
    """A scorer response failed validation (structure, ids, range, or sum)."""


class ScorerFailureError(RuntimeError):
    """A scorer query exhausted retries; carries any valid partial samples."""

    def __init__(self, message, partial=(), request_errors=()):
        super().__init__(message)
        self.partial = list(partial)
        self.request_errors = list(request_errors)
