from typing import List, Optional, Sequence


class CausalInfoError(ValueError):
    """Base class of every domain error raised by the package."""


class UnknownVariable(CausalInfoError):
    pass


class ZeroProbabilityEvent(CausalInfoError):
    pass


class ScopeOverlap(CausalInfoError):
    pass


class BadScope(CausalInfoError):
    pass


class NotNormalized(CausalInfoError):
    pass


class InvalidModel(CausalInfoError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class JointSizeExceeded(CausalInfoError):
    pass


class CycleCreated(CausalInfoError):
    pass


class RangeMismatch(CausalInfoError):
    pass


class BadQuery(CausalInfoError):
    pass


class InconsistentResult(CausalInfoError):
    """Two formulas for the same quantity disagree beyond tolerance."""


class ParseError(CausalInfoError):
    """Lexical, syntax or semantic error in `.scm` text.

    Args:
        message (str): Human readable description.
        span (SourceSpan): Location of the offending text.
        expected (Sequence[str]): Tokens or constructs that were expected.
        phase (str): One of "lexical", "syntax", "semantic".
        errors (List[ParseError], optional): All semantic errors found, sorted
            by span and message. The exception itself is the first of them.
    """

    def __init__(
        self,
        message: str,
        span,
        expected: Sequence[str],
        phase: str = "syntax",
        errors: Optional[List["ParseError"]] = None,
    ):
        self.message = message
        self.span = span
        self.expected = tuple(sorted(set(expected)))
        self.phase = phase
        self.errors = errors if errors is not None else [self]
        super().__init__(self.render())

    def render(self) -> str:
        expected = ", ".join(self.expected)
        return (
            f"{self.span.line}:{self.span.column}: {self.phase} error: "
            f"{self.message} (expected {expected})"
        )
