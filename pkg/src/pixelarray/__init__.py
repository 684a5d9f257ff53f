"""Pixel array solver: plot each relation of a system on a grid, then combine
the plots by generalized array multiplication over a wiring diagram.

Typical use::

    from pixelarray import SystemSpec, compile, solve
    spec = SystemSpec.from_strings(
        {"M1": "w - x^2 = 0", "M2": "w - (1 - y^2) = 0"},
        {v: (-1.2, 1.2, 50) for v in "wxy"},
        exposed=["x", "y"],
    )
    solution = solve(compile(spec))
"""
from .cluster import CostPoly, Leaf, Node, plan, tree_cost
from .errors import CostOverflow, PixelArrayError
from .expr import parse_expr, parse_relation
from .gam import BOOL, COUNT, PixelArray, general_multiply, specialization_diagram
from .model import OUTER, Pack, Port, WiringDiagram, build_wiring_diagram, make_pack
from .plot import sample_in_center_plot
from .render import render_ascii, render_json, render_pbm
from .solver import SystemSpec, compare, compile, oracle_solve, solve
from .sysfile import parse_system

__version__ = "0.1.0"

__all__ = [
    "BOOL",
    "COUNT",
    "OUTER",
    "CostOverflow",
    "CostPoly",
    "Leaf",
    "Node",
    "Pack",
    "PixelArray",
    "PixelArrayError",
    "Port",
    "SystemSpec",
    "WiringDiagram",
    "build_wiring_diagram",
    "compare",
    "compile",
    "general_multiply",
    "make_pack",
    "oracle_solve",
    "parse_expr",
    "parse_relation",
    "parse_system",
    "plan",
    "render_ascii",
    "render_json",
    "render_pbm",
    "sample_in_center_plot",
    "solve",
    "specialization_diagram",
    "tree_cost",
]
