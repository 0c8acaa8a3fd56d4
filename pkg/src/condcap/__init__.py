"""Capacity of planar condensers via a boundary integral method."""

from .bie import BieSolution, GnkSolver, SolverError, SolverOptions, solve_gnk
from .condenser import (
    CaseInfo,
    CondenserProblem,
    CondenserResult,
    ConstantsSolution,
    capacity,
    classify,
    run,
)
from .field import FieldGrid, PotentialField, cauchy_eval, harmonic_measure
from .geometry import (
    BoundaryComponent,
    Discretization,
    GeometryError,
    discretize,
    make_circle,
    make_ellipse,
    make_polygon,
    make_trig_curve,
    winding_number,
)
from .kernels import RHCoefficient, apply_M, assemble_N, coefficient

__all__ = [
    "BieSolution",
    "BoundaryComponent",
    "CaseInfo",
    "CondenserProblem",
    "CondenserResult",
    "ConstantsSolution",
    "Discretization",
    "FieldGrid",
    "GeometryError",
    "GnkSolver",
    "PotentialField",
    "RHCoefficient",
    "SolverError",
    "SolverOptions",
    "apply_M",
    "assemble_N",
    "capacity",
    "cauchy_eval",
    "classify",
    "coefficient",
    "discretize",
    "harmonic_measure",
    "make_circle",
    "make_ellipse",
    "make_polygon",
    "make_trig_curve",
    "run",
    "solve_gnk",
    "winding_number",
]

__version__ = "0.1.0"
