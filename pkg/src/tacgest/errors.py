"""Exception types shared across the package."""


class DomainError(ValueError):
    """A value violates a domain contract (bad label id, coordinate, shape)."""


class OscParseError(ValueError):
    """Malformed OSC packet. Carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DataFormatError(ValueError):
    """Malformed dataset or model file. Carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
