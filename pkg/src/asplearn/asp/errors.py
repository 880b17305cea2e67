"""Exception types shared across the ASP engine."""


class AspError(Exception):
    """Base class for engine errors."""


class ParseError(AspError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class SafetyError(AspError):
    """A rule has an unbound variable in its head, a NAF literal or a comparison."""

    def __init__(self, message, rule_text=None):
        self.rule_text = rule_text
        if rule_text is not None:
            message = f"{message}: {rule_text}"
        super().__init__(message)


class UnsupportedConstructError(AspError):
    """Input uses a construct outside the supported fragment."""


class GroundingError(AspError):
    """Grounding failed (unguarded domain, non-integer arithmetic, ...)."""


class CapacityError(AspError):
    """A configured resource cap was exceeded.  Never raised as silent truncation."""
