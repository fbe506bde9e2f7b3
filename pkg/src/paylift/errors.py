"""Exception types shared across the stack."""


class PayliftError(Exception):
    pass


class NonFiniteState(PayliftError):
    """Simulation state left the finite range (controller blow-up)."""


class DegenerateForce(PayliftError):
    """Cable force too small to define a direction."""


class BadGeometry(PayliftError):
    """Geometric precondition violated (e.g. r >= 2l)."""


class DegenerateAxis(PayliftError):
    """Tilt axis undefined (separating normal parallel to e3)."""


class NoIntersection(PayliftError):
    """Cable sphere does not reach the separating plane."""


class InfeasiblePair(PayliftError):
    """Separating-hyperplane QP infeasible: pair geometry violated."""


class SingularMap(PayliftError):
    """Allocation map too ill-conditioned to invert."""


class RankDeficient(PayliftError):
    """Allocation map loses row rank (degenerate attachment geometry)."""


class SolverFailure(PayliftError):
    """QP solver did not return a usable solution."""


class Infeasible(PayliftError):
    """QP constraints admit no point."""


class ShapeMismatch(PayliftError):
    """Problem-family data update changed shapes."""


class PresetUnavailable(PayliftError):
    """Formation preset incompatible with the rig."""


class AbortedRun(PayliftError):
    """Scenario run aborted; carries the partial result."""

    def __init__(self, reason, partial=None):
        super().__init__(reason)
        self.reason = reason
        self.partial = partial
