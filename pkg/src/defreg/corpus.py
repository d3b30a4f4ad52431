"""Built-in demo corpus: formulas and bipartite graphs with known behaviour.

The quadratic-residue edge relation needs p = 1 mod 4 so that -1 is a
square and adjacency is symmetric; the demo filters its field family
accordingly for the graph steps.
"""

from __future__ import annotations

from fractions import Fraction

from .counting import DefinableSet, definable_set
from .regularity import BipartiteDefinableGraph, graph_from_spec

# (name, formula, objects, expected (dim, measure) or "empty")
DIM_EXAMPLES = [
    ("squares", "E y. y*y = x", ("x",), (1, Fraction(1, 2))),
    ("parabola", "y = x*x", ("x", "y"), (1, Fraction(1))),
    ("unit-circle", "x*x + y*y = 1", ("x", "y"), (1, Fraction(1))),
    ("full-line", "x = x", ("x",), (1, Fraction(1))),
    ("unsatisfiable", "!(x = x)", ("x",), "empty"),
]

# (name, formula, objects, params, expected invariant labels with per-field sizes as
#  functions of q)
CLASSIFY_EXAMPLES = [
    ("square-class-fiber", "E z. (z*z = x*y & !(x*y = 0))", ("x",), ("y",),
     [((1, Fraction(1, 2)), lambda q: q - 1), ("empty", lambda q: 1)]),
    ("reciprocal", "y*x = 1", ("x",), ("y",),
     [((0, Fraction(1)), lambda q: q - 1), ("empty", lambda q: 1)]),
]

GRAPH_SPECS = {
    "paley": {
        "name": "paley",
        "V": {"formula": "x = x", "variables": ["x"]},
        "W": {"formula": "y = y", "variables": ["y"]},
        "E": {"formula": "E z. (z*z = x - y & !(x = y))", "objects": ["x"], "params": ["y"]},
    },
    "square-class": {
        "name": "square-class",
        "V": {"formula": "!(x = 0)", "variables": ["x"]},
        "W": {"formula": "!(y = 0)", "variables": ["y"]},
        "E": {"formula": "E z. (z*z = x*y & !(x*y = 0))", "objects": ["x"], "params": ["y"]},
    },
    "function-graph": {
        "name": "function-graph",
        "V": {"formula": "x = x", "variables": ["x"]},
        "W": {"formula": "y = y", "variables": ["y"]},
        "E": {"formula": "x = y*y", "objects": ["x"], "params": ["y"]},
    },
    "edgeless": {
        "name": "edgeless",
        "V": {"formula": "x = x", "variables": ["x"]},
        "W": {"formula": "y = y", "variables": ["y"]},
        "E": {"formula": "!(x = x) & y = y", "objects": ["x"], "params": ["y"]},
    },
}

# graphs whose intended structure requires p = 1 mod 4
NEEDS_1_MOD_4 = {"paley", "square-class"}


def builtin_graph(name: str) -> BipartiteDefinableGraph:
    return graph_from_spec(GRAPH_SPECS[name])


def dim_example_set(name: str) -> DefinableSet:
    for n, text, objects, _ in DIM_EXAMPLES:
        if n == name:
            return definable_set(text, objects)
    raise KeyError(name)
