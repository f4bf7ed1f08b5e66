"""Exception hierarchy shared by all analyses.

Exit-code contract for the CLI: 0 means every asserted inequality held,
1 means an asserted inequality failed (a finding, not a crash), and 2+
are operational errors.  The codes below 5 are pinned; everything else
maps to 5.
"""

from __future__ import annotations


class TransitError(Exception):
    """Base class; carries the process exit code for the CLI."""

    exit_code = 5


class ParseError(TransitError):
    """Malformed or inconsistent input file."""

    exit_code = 2


class EmptySolutionSet(TransitError):
    """A transition analysis was asked to run on an empty solution set."""

    exit_code = 3


class UndefinedPrice(TransitError):
    """An efficiency ratio has a nonpositive denominator."""

    exit_code = 4


class TooLarge(TransitError):
    """Enumeration would exceed the configured profile cap."""


class NotATransition(TransitError):
    """Degree queries require the profile to be a transition first."""


class WrongArity(TransitError):
    """Operation restricted to a fixed number of players."""


class WrongConvention(TransitError):
    """Operation restricted to one payoff convention."""


class NotIdenticalUtility(TransitError):
    """Players' payoff vectors differ where identity is required."""


class PreconditionFailed(TransitError):
    """A theorem harness refused to assert because a hypothesis fails."""


class CertificateInvalid(TransitError):
    """Decomposition certificate violates its own invariants."""


class Infeasible(TransitError):
    """No witness satisfies the requested constraints."""


class NoConvergence(TransitError):
    """Iterative solver hit its cap; carries the achieved gap."""

    def __init__(self, message: str, gap: float | None = None):
        super().__init__(message)
        self.gap = gap


class TopologyMismatch(TransitError):
    """Graph does not have the topology a construction requires."""


class NotTwoColour(TransitError):
    """Fast stable-transition check needs exactly two colours per node."""


class BadParams(TransitError):
    """Instance-family parameters outside their documented ranges."""
