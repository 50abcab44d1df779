"""Exception types. Every toolkit error derives from :class:`TokfairError`."""


class TokfairError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class FormatError(TokfairError, ValueError):
    """A file did not parse as the expected format."""


class ConfigError(TokfairError):
    """Inputs parse but are inconsistent (missing reference, missing scorer)."""


class UnknownLanguageError(TokfairError, LookupError):
    def __init__(self, code):
        super().__init__(f"unknown language code: {code!r}")
        self.code = code


class IntegrityError(TokfairError, ValueError):
    """A tokenizer model violates one of its structural invariants."""


class AlignmentError(TokfairError):
    """Parallel files disagree on line count."""


class CorpusEncodingError(TokfairError, UnicodeError):
    pass


class DecodeError(TokfairError, ValueError):
    """A token string cannot be mapped back to bytes."""


class EmptyStatisticError(TokfairError):
    """Every sample was skipped, so no statistic exists."""


class UndefinedRatioError(TokfairError, ZeroDivisionError):
    pass


class UndefinedCorrelationError(TokfairError, ValueError):
    """Correlation requested for a constant vector or fewer than two points."""


class InsufficientDataError(TokfairError, ValueError):
    pass


class DataError(TokfairError, ValueError):
    """A record holds an invalid value (negative or non-finite NLL)."""
