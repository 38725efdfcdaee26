"""Exception types shared across the package."""


class FormatError(ValueError):
    """Raised when a file is malformed or uses an unsupported encoding."""


class SingularMatrixError(RuntimeError):
    """Raised when a per-frequency linear system is singular even after loading.

    Attributes:
        frequency_bin: index of the offending frequency bin, or None when
            the failure could not be narrowed down to a single bin.
    """

    def __init__(self, message, frequency_bin=None):
        super().__init__(message)
        self.frequency_bin = frequency_bin
