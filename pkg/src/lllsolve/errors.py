"""Exception types raised across the solver package."""


class LLLError(Exception):
    """Base class for all package errors."""


class InvalidInstanceError(LLLError, ValueError):
    """A problem instance, variable, event or assignment breaks its invariants."""


class EnumerationLimitExceeded(LLLError):
    """A brute-force routine would have to enumerate more than its guard allows."""


class SuppliedEdgeError(LLLError, ValueError):
    """A supplied lopsided edge joins two events with disjoint supports."""


class ImproperTreeError(LLLError, ValueError):
    """A witness tree has two sibling vertices with the same label."""


class TableExhausted(LLLError):
    """A draw or lookup reached past the last row of a sample table."""


class MissingConditionalError(LLLError):
    """An event lacks the conditional-probability capability."""


class ConditionFailed(LLLError):
    """The Local Lemma condition does not hold for the supplied weights."""


class DerandomizationError(LLLError):
    """An internal invariant of the derandomized solver was breached (a bug)."""


class ParseError(LLLError, ValueError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
