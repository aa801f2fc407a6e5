"""Exception hierarchy shared by all modules.

Every error derives from :class:`ShearletError`; the ones signalling a bad
argument value also derive from :class:`ValueError` so generic handlers keep
working.
"""


class ShearletError(Exception):
    """Base class for all package errors."""


class DomainError(ShearletError, ValueError):
    """An argument lies outside the mathematically admissible range."""


class InvalidFilterError(ShearletError, ValueError):
    """A filter tap sequence is empty or malformed."""


class AssetError(ShearletError):
    """A shipped data asset is missing or fails its checksum."""


class UnsupportedSizeError(ShearletError, ValueError):
    """The requested grid is too small to host the filters."""


class SingularFrameError(ShearletError):
    """The frame weight vanishes somewhere, so no dual filters exist."""


class ShapeError(ShearletError, ValueError):
    """Array dimensions do not match the system or each other."""


class FormatError(ShearletError):
    """A file or byte stream is truncated or has the wrong layout."""


class ConfigError(ShearletError, ValueError):
    """Pipeline parameters are inconsistent with the system."""


class DegenerateInputError(ShearletError, ValueError):
    """Input carries no information (empty mask, zero-energy truth)."""
