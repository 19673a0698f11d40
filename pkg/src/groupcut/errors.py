class DomainError(ValueError):
    """Raised when an argument is outside an operation's stated domain."""


class FormatError(ValueError):
    """Raised when serialized input does not satisfy the interchange schema."""
