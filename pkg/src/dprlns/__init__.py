"""Large Neighborhood Search solver for CVRPTW with a dynamic partial removal
destroy operator and a graph-network anchor policy."""

from .model import Instance, Node, Solution, solution_cost, check_route
from .search import SearchConfig, lns_run

__all__ = ["Instance", "Node", "Solution", "solution_cost", "check_route",
           "SearchConfig", "lns_run"]

__version__ = "0.1.0"
