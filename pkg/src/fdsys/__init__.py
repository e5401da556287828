"""Exact stability, instability and fixed-point computations for finite dynamical systems."""
from .digraph import Digraph
from .errors import BudgetExceeded, GraphFormatError
from .fds import Fds, LocalFunction, StateVector, instability, interaction_graph, stability

__all__ = ["BudgetExceeded", "Digraph", "Fds", "GraphFormatError", "LocalFunction", "StateVector",
           "instability", "interaction_graph", "stability"]
__version__ = "0.1.0"
