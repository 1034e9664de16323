"""Exception hierarchy shared by all relatekit modules."""


class RelateKitError(Exception):
    """Base class for every error raised by this package."""


class DataError(RelateKitError):
    """Malformed, inconsistent, or missing input data (CLI exit code 2)."""


class FormatError(DataError):
    """A binary or JSONL file does not follow its declared format."""


class NumericError(RelateKitError):
    """A computation could not be carried out numerically (CLI exit code 3)."""


class DegenerateDataError(NumericError):
    """A statistical test was handed data with no variance to work with."""
