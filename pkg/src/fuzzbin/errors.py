"""Exception hierarchy shared by the library, the service, and the CLI.

The three leaf categories map one-to-one onto CLI exit codes and HTTP error
payloads: usage (1), data (2), numeric (3).
"""


class FuzzbinError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class UsageError(FuzzbinError):
    """Caller passed arguments outside the documented contract."""

    code = "usage"


class DataError(FuzzbinError):
    """Input bytes could not be parsed or violate the declared schema."""

    code = "data"


class EmptySignatureError(DataError):
    """Image contains no ink pixels after noise removal."""


class NumericError(FuzzbinError):
    """A numerical procedure failed in a way the caller must handle."""

    code = "numeric"


class DegenerateClusterError(NumericError):
    """A cluster lost all effective membership mass during training."""

    def __init__(self, cluster: int):
        super().__init__(f"cluster {cluster} has zero total membership weight")
        self.cluster = cluster
