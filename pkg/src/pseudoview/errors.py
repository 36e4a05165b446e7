"""Exception types raised by pseudoview.

Plain ``ValueError`` is used for argument/shape validation; the classes here
mark failure modes that callers may want to handle individually.
"""


class PseudoviewError(Exception):
    """Base class for pseudoview-specific runtime failures."""


class FormatError(PseudoviewError):
    """A file could not be parsed (malformed header, truncated payload, ...)."""


class InsufficientDataError(PseudoviewError):
    """Not enough valid samples to run an operation."""


class RankDeficiencyError(PseudoviewError):
    """The fitting problem is degenerate (parameters not identifiable)."""


class CertificationError(PseudoviewError):
    """A candidate pseudo-view pose could not be certified within budget."""


class InpaintContractError(PseudoviewError):
    """An inpainter modified pixels outside the hole mask or grew the mask."""


class RenderError(PseudoviewError):
    """A scene could not be rendered from the requested viewpoint."""
