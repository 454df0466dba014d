"""Counterterm combinatorics for the geometric stochastic heat equation.

The exact layer builds the free tensor-trace-derivation algebra of decorated
graphs, enumerates the 54-dimensional paired-symbol space, and computes the
geometric and Ito subspaces with rational linear algebra; the jets layer
realises the valuation into concrete tensor fields; the numeric layer
reproduces the quantitative constants and runs demonstration solvers on the
circle.
"""

from .algebra import (LinComb, act, coproduct, decompose, derive,
                      derive_adjoint, generator, graft, inner, product,
                      rebuild, trace, trace_adjoint, unit)
from .graphs import (DegreeError, GeneratorType, PairingError, ParseError,
                     StructureError, XGraph, format_graph, parse_graph)
from .symbols import (GAMMA, DIFF, GPAIR, NOISE, enumerate_basis, full_basis,
                      iota_expand, symmetry_factor, unpaired_symmetry_factor)

__all__ = [
    "LinComb", "XGraph", "GeneratorType",
    "act", "coproduct", "decompose", "derive", "derive_adjoint",
    "generator", "graft", "inner", "product", "rebuild", "trace",
    "trace_adjoint", "unit",
    "DegreeError", "PairingError", "ParseError", "StructureError",
    "format_graph", "parse_graph",
    "GAMMA", "DIFF", "GPAIR", "NOISE",
    "enumerate_basis", "full_basis", "iota_expand", "symmetry_factor",
    "unpaired_symmetry_factor",
]

__version__ = "0.1.0"
