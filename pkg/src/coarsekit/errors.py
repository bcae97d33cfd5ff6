from __future__ import annotations


class CoarseKitError(Exception):
    """Base class for all errors raised by coarsekit."""


class StructureError(CoarseKitError, ValueError):
    """Malformed input data (wrong table shapes, unknown ids, ...)."""


class SpaceMismatchError(CoarseKitError, ValueError):
    pass


class NotASubgroupError(CoarseKitError, ValueError):
    pass


class NoFiniteConstantError(CoarseKitError, ValueError):
    """A quantity that must be finite for the operation turned out infinite."""


class AmbiguousDecompositionError(CoarseKitError):
    """The factor permutation of a product map cannot be read off at the given scale."""


class NotProductPreservingError(CoarseKitError):
    pass


class CapExceededError(CoarseKitError):
    pass


class CertificateError(CoarseKitError, AssertionError):
    """A bound that holds by construction was violated: an internal bug."""


class InputError(CoarseKitError):
    """Unparseable or inconsistent input file."""
