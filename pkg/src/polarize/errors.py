"""Exception hierarchy shared across the toolkit.

Exceptions are grouped by how the command line reports them: parse
problems exit 2, dimension/feasibility problems exit 3, solver failures
exit 4, and violated internal guarantees exit 5.
"""

from __future__ import annotations


class PolarizeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


# --- input parsing -----------------------------------------------------------


class ParseError(PolarizeError):
    exit_code = 2


class MalformedLineError(ParseError):
    """Edge-list or opinion line that does not match the expected format."""


class NegativeWeightError(ParseError):
    """Edge weight below zero."""


class SelfLoopError(ParseError):
    """Edge whose endpoints coincide."""


class DuplicateEdgeError(ParseError):
    """Same undirected node pair listed twice."""


class IndexOutOfRangeError(ParseError):
    """Node index outside [0, n)."""


# --- dimensions and feasibility ---------------------------------------------


class FeasibilityError(PolarizeError):
    exit_code = 3


class DimensionMismatchError(FeasibilityError):
    """Vector length does not match the node count."""


class ShapeMismatchError(FeasibilityError):
    """Array arguments with incompatible shapes."""


class EmptyVectorError(FeasibilityError):
    """Operation undefined on a zero-length vector."""


class InvalidProbabilityError(FeasibilityError):
    """Probability outside [0, 1]."""


class InvalidRangeError(FeasibilityError):
    """Interval bounds out of order or otherwise unusable."""


class InvalidBoundsError(FeasibilityError):
    """Box constraint with lower bound above upper bound."""


class NegativeTotalError(FeasibilityError):
    """Budget or radius below zero."""


class NoSuchEdgeError(FeasibilityError):
    """Queried node pair carries no edge."""


class TooLargeError(FeasibilityError):
    """Search space beyond the exhaustive-enumeration guard."""


class KTooLargeError(FeasibilityError):
    """Target budget k exceeds the number of nodes."""


# --- solvers -----------------------------------------------------------------


class SolverError(PolarizeError):
    exit_code = 4


class SolverFailureError(SolverError):
    """Linear solve did not reach the requested residual."""


class MaxIterationsExceededError(SolverError):
    """Iteration cap hit before the tolerance was met."""


class NoConvergenceError(SolverError):
    """Alternating projections did not settle inside every constraint set."""


class NonFiniteObjectiveError(SolverError):
    """Objective evaluated to NaN or infinity."""


# --- violated guarantees -----------------------------------------------------


class InternalCheckError(PolarizeError):
    exit_code = 5


class BoundViolatedError(InternalCheckError):
    """A proved upper bound failed on a concrete instance."""
