"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes, so every error a caller may want to
branch on lives here rather than as bare ValueErrors.
"""

from __future__ import annotations


class IfpSyncError(ValueError):
    """Base class for all ifpsync errors."""


# --- graph construction / structure ---------------------------------------

class NotSquare(IfpSyncError):
    """Adjacency matrix is not square."""


class NegativeWeight(IfpSyncError):
    """Adjacency matrix contains a negative entry."""


class SelfLoop(IfpSyncError):
    """Adjacency matrix has a nonzero diagonal entry."""


class NotStronglyConnected(IfpSyncError):
    """Operation requires a strongly connected digraph."""


# --- transfer functions / passivity ----------------------------------------

class ZeroPolynomial(IfpSyncError):
    """The zero polynomial was passed where a nonzero one is required."""


class PoleOnAxis(IfpSyncError):
    """Frequency response requested at (numerically) a pole."""


class NotCertifiable(IfpSyncError):
    """Transfer function fails the positive-real-lemma pole conditions."""


class BOutOfRange(IfpSyncError):
    """Feedback shift b outside (0, 1/(2*alpha))."""


class DimensionMismatch(IfpSyncError):
    """Vector arguments have inconsistent dimensions."""


# --- certificates -----------------------------------------------------------

class BadDimensions(IfpSyncError):
    """Gain set has inconsistent lengths or non-positive entries."""


class CertificateFailed(IfpSyncError):
    """A prerequisite certificate does not hold."""


class MuTauViolation(IfpSyncError):
    """Vehicle lag/velocity-gain product mu*tau >= 1/2."""


# --- simulation -------------------------------------------------------------

class NumericalBlowup(IfpSyncError):
    """State magnitude exceeded the divergence threshold.

    simulate() reports divergence in the result instead of raising; this class
    exists for callers that drive step_network directly.
    """


class HistoryUnderflow(IfpSyncError):
    """Delay lookup before the recorded input history."""


class EmptyTrajectory(IfpSyncError):
    """Metrics requested for an empty trajectory."""
