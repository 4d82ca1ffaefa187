"""Exception types shared across the package."""


class SegscoreError(Exception):
    """Base class for every error raised by this package."""


class MalformedInput(SegscoreError):
    """Page input was not a decodable HTML byte stream."""


class EmptyPage(SegscoreError):
    """The parsed page body holds no visible text."""


class ProviderUnavailable(SegscoreError):
    """An annotation provider could not be reached or has no answer."""


class ProviderProtocol(SegscoreError):
    """An annotation provider answered with a malformed payload."""


class MissingFile(SegscoreError):
    """A required input file does not exist."""


class MalformedProfile(SegscoreError):
    """Profile data violates the profile schema."""


class StorageFailure(SegscoreError):
    """A snapshot or profile write/read failed at the storage layer."""


class EmptySession(SegscoreError):
    """Session statistics were requested for zero page reports."""
