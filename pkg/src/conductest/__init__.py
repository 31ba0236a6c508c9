"""Distributed conductance tester: CONGEST simulation plus an exact spectral oracle."""

from .graph import Graph, VertexSet, parse_edge_list, load_edge_list
from .generators import generate, parse_spec
from .tester import TesterConfig, run_tester

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "VertexSet",
    "TesterConfig",
    "generate",
    "load_edge_list",
    "parse_edge_list",
    "parse_spec",
    "run_tester",
]
