from .algebra import Element, LeavittAlgebra, Monomial
from .graph import Graph, parse_graph, serialize_graph
from .scalar import Field

__all__ = [
    "Element",
    "Field",
    "Graph",
    "LeavittAlgebra",
    "Monomial",
    "parse_graph",
    "serialize_graph",
]

__version__ = "0.1.0"
