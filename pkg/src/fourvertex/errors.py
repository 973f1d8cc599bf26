"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`FourVertexError`.  The CLI maps the families below to exit codes.
"""


class FourVertexError(Exception):
    pass


class InstanceError(FourVertexError, ValueError):
    """Input validation failure (CLI exit code 2)."""


class MalformedLine(InstanceError):
    pass


class SlotReused(InstanceError):
    pass


class NotFourRegular(InstanceError):
    pass


class BadParams(InstanceError):
    pass


class RotationIncomplete(InstanceError):
    pass


class MismatchedDecomposition(InstanceError):
    pass


class NotPlanarEmbedding(InstanceError):
    pass


class MissingOuterFace(InstanceError):
    pass


class ArityTooLarge(InstanceError):
    pass


class BetaAtMostOne(InstanceError):
    pass


class NoEdges(InstanceError):
    pass


class InvalidState(InstanceError):
    pass


class TooLarge(FourVertexError):
    """An exact enumeration would exceed its configured cap (exit code 4)."""


class NotFerromagnetic(FourVertexError):
    """A circuit graph still carries an antiferromagnetic interaction."""


class NoFerroReduction(FourVertexError):
    """The GF(2) flip system has no solution (exit code 3)."""


class InternalError(FourVertexError, AssertionError):
    """An invariant that should hold by construction was violated (exit code 5)."""
