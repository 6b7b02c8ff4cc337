"""Exception types raised across the package."""


class ToricNegativityError(Exception):
    """Base class for all package errors."""


class InvalidLatticeError(ToricNegativityError, ValueError):
    pass


class InvalidPartitionError(ToricNegativityError, ValueError):
    pass


class ResourceLimitError(ToricNegativityError, MemoryError):
    """A dense allocation would exceed a configured qubit cap."""


class DomainError(ToricNegativityError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class UnsupportedSettingError(ToricNegativityError, ValueError):
    """A configuration falls outside the closed-form setting taxonomy.

    ``witness`` carries the classifier output that failed.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}
