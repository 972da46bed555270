"""Exception types raised by the library.

Everything derives from ValueError so casual callers can catch broadly,
while tests and the CLI can distinguish failure modes.
"""


class RgSpectraError(ValueError):
    """Base class for all library errors."""


class DimensionMismatchError(RgSpectraError):
    """Sites of different dimension mixed in one object."""


class EmptySetError(RgSpectraError):
    """An operation that requires a nonempty site set received the empty set."""


class EnumerationCapError(RgSpectraError):
    """A spin enumeration would exceed the configured cap."""


class MissingSiteError(RgSpectraError):
    """A spin lookup referenced a site the configuration does not cover."""


class InvalidSpecError(RgSpectraError):
    """Transformation spec is inconsistent (e.g. majority rule with even blocking factor)."""


class InvalidParameterError(RgSpectraError):
    """A numeric parameter is outside its valid range."""


class LatticeTagError(RgSpectraError):
    """Coefficient vectors living on different lattices were combined."""


class SupportOutOfVolumeError(RgSpectraError):
    """An interaction's support escapes the finite volume it is evaluated on."""


class DegenerateKernelError(RgSpectraError):
    """A frozen partition function came out nonpositive; cannot take its log."""


class NotInBlockError(RgSpectraError):
    """A site pattern is not contained in the block it was attributed to."""


class WindowError(RgSpectraError):
    """An output window is too small to hold the result it must bound."""


class TruncationError(RgSpectraError):
    """A check was requested on a set whose operator preimage leaves the truncation."""


class OutOfDiskError(RgSpectraError):
    """An eigenvalue parameter lies outside the disk where the claim holds."""


class DuplicateEntryError(RgSpectraError):
    """A serialized coefficient vector lists the same site set twice."""
