"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter is outside its mathematically valid domain."""


class TruncationOverflow(ArithmeticError):
    """The truncated Fock space cannot hold the requested state.

    Raised when an operation would push more probability mass past the
    cutoff than the active truncation policy tolerates.
    """


class ConfigError(Exception):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """The configuration file is not syntactically valid."""


class ValidationError(ConfigError):
    """A configuration value violates a constraint.

    The message always names the offending field.
    """
