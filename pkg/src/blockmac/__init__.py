"""Macaulay matrix solver for polynomial systems and rectangular multiparameter
eigenvalue problems."""

from .basis import BasisRule, OrderRule, block_size, cumulative_size, exponent_at, position, shift_rule
from .macaulay import MacaulayMatrix, build, enlarge
from .mlp import parse_problem, serialize_problem
from .problem import Problem, SolutionSet, convert_basis, evaluate, make_mep, make_system, residual
from .realization import SolverOptions, solve
from .subspace import nullspace, nullspace_recursive, rank_structure

__all__ = [
    "BasisRule", "OrderRule", "block_size", "cumulative_size", "exponent_at", "position", "shift_rule",
    "MacaulayMatrix", "build", "enlarge", "parse_problem", "serialize_problem", "Problem",
    "SolutionSet", "convert_basis", "evaluate", "make_mep", "make_system", "residual",
    "SolverOptions", "solve", "nullspace", "nullspace_recursive", "rank_structure",
]

__version__ = "0.1.0"
