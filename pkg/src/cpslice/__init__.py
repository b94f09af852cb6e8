"""Exact computations for C_p-Mackey functors: homology of representation
spheres, slice towers and slice spectral sequence charts."""

from .builtins import builtin, generic, random_mackey
from .chart import Chart, chart_for, decorate, e2_page, e_infty, simplify_symbols, verify_convergence
from .mackey import CpMackey, MackeyHom, derived, derived_functors, twist, validate
from .spheres import VirtualRep, crosscheck, homology_of_sphere, parse_rep
from .tower import slice_parameters, slice_tower

__version__ = "0.1.0"

__all__ = [
    "Chart", "CpMackey", "MackeyHom", "VirtualRep", "builtin", "chart_for", "crosscheck",
    "decorate", "derived", "derived_functors", "e2_page", "e_infty", "generic",
    "homology_of_sphere", "parse_rep", "random_mackey", "simplify_symbols", "slice_parameters",
    "slice_tower", "twist", "validate", "verify_convergence",
]
