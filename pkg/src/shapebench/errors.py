"""Error taxonomy shared across the package.

The CLI maps these onto its stable exit codes: FormatError (and OSError)
exit 2, DomainError exit 1.
"""


class ShapebenchError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ShapebenchError):
    """Malformed input: bad file bytes, unparseable names, wrong counts."""


class DomainError(ShapebenchError):
    """Well-formed input that violates a benchmark-domain rule."""


class ViewNameError(FormatError):
    """View name does not match the canonical grammar."""


class ManifestParseError(FormatError):
    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = failures or []


class ManifestGridError(DomainError):
    def __init__(self, message: str, duplicates=None, missing=None):
        super().__init__(message)
        self.duplicates = duplicates or []
        self.missing = missing or []
