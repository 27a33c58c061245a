"""Multi-criteria graph layout by gradient descent on readability losses."""

from .criteria import (CriterionId, CrossingSeparators, Hyper, LossResult,
                       NpConfig, quality, quality_report)
from .errors import (CoincidentNodes, DegenerateLayout, DisconnectedGraph,
                     FormatError, GdLayoutError, GraphError, LayoutError,
                     MissingSeparator, NumericalDivergence, ZeroLengthEdge)
from .geometry import CrossingPair, count_crossings, detect_crossings
from .graph_model import Graph, generate, make_graph, shortest_paths
from .optimizer import (OptimizationRun, OptimizerConfig, RunTrace,
                        WeightSchedule, random_layout, run, step,
                        total_loss_and_grad)

__version__ = "0.1.0"

__all__ = [
    "CriterionId", "CrossingSeparators", "Hyper", "LossResult", "NpConfig",
    "quality", "quality_report", "CoincidentNodes", "DegenerateLayout",
    "DisconnectedGraph", "FormatError", "GdLayoutError", "GraphError",
    "LayoutError", "MissingSeparator", "NumericalDivergence",
    "ZeroLengthEdge", "CrossingPair", "count_crossings", "detect_crossings",
    "Graph", "generate", "make_graph", "shortest_paths", "OptimizationRun",
    "OptimizerConfig", "RunTrace", "WeightSchedule", "random_layout", "run",
    "step", "total_loss_and_grad", "__version__",
]
