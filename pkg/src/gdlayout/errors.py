"""Exception types raised by the layout engine.

Everything user-facing derives from GdLayoutError so the CLI can map
failures onto exit codes without enumerating causes.
"""


class GdLayoutError(Exception):
    """Base class for all engine errors."""


class GraphError(GdLayoutError):
    """Invalid graph structure or graph construction parameters."""


class DisconnectedGraph(GraphError):
    """Shortest-path distances requested on a graph with unreachable pairs."""


class LayoutError(GdLayoutError):
    """A layout is unusable for the requested computation."""


class CoincidentNodes(LayoutError):
    """Two nodes closer than the coincidence tolerance where distinctness is required."""


class ZeroLengthEdge(LayoutError):
    """An edge of (numerically) zero length where a direction is required."""


class DegenerateLayout(LayoutError):
    """Layout collapsed to the point where a loss is undefined (zero extent)."""


class NumericalDivergence(GdLayoutError):
    """Optimization produced non-finite coordinates.

    Carries the trace collected up to the failing iteration so callers can
    inspect what happened before the blow-up.
    """

    def __init__(self, message: str, iteration: int, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = trace


class MissingSeparator(GdLayoutError):
    """Crossing loss asked for a pair that has no fitted separator."""


class FormatError(GdLayoutError):
    """Malformed graph/layout/schedule file."""
