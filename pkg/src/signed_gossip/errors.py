"""Exception types shared across the package."""


class SignedGossipError(Exception):
    """Base class for all errors raised by this package."""


class SelfLoopError(SignedGossipError):
    """An arc connects a node to itself."""


class OverlapError(SignedGossipError):
    """An arc appears in both the attractive and the repulsive set."""


class StochasticityError(SignedGossipError):
    """A row of the selection matrix does not sum to one within tolerance."""


class InvalidPairError(SignedGossipError):
    """A repulsive node pair is malformed (self pair, out of range, duplicate)."""


class NotRingEdgeError(SignedGossipError):
    """A repulsive pair is not an edge of the ring graph."""


class NotSymmetricError(SignedGossipError):
    """An operation requiring a symmetric matrix received an asymmetric one."""


class NoConvergenceError(SignedGossipError):
    """An iterative solver hit its iteration cap before converging."""


class DimensionError(SignedGossipError):
    """Matrix arguments have incompatible shapes."""


class GainRangeError(SignedGossipError):
    """A gain value is outside its admissible range."""


class HypothesisError(SignedGossipError):
    """The structural hypotheses of a threshold computation are violated."""


class EmptyRepulsiveError(SignedGossipError):
    """The repulsive arc set is empty, so no divergence threshold exists."""


class NotCompleteUniformError(SignedGossipError):
    """The graph is not a uniformly weighted complete graph with a bidirectional partition."""


class OverflowGuardError(SignedGossipError):
    """A state update exceeded the overflow guard magnitude."""
