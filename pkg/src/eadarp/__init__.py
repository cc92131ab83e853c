"""Electric dial-a-ride solver: instance model, fragment-based route
evaluation and a deterministic annealing local search."""

from .model import (Instance, InstanceError, Node, generate_instance,
                    parse_instance, emit_instance, validate_instance)
from .preprocess import preprocess, tighten_time_windows, eliminate_arcs
from .fragments import FragmentTable
from .routeval import Evaluator, check_route
from .search import DAParams, da_search

__all__ = [
    "Instance", "InstanceError", "Node", "generate_instance",
    "parse_instance", "emit_instance", "validate_instance",
    "preprocess", "tighten_time_windows", "eliminate_arcs",
    "FragmentTable", "Evaluator", "check_route",
    "DAParams", "da_search",
]

__version__ = "1.0.0"
