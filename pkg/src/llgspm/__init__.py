"""Finite-difference Landau-Lifshitz-Gilbert solvers built on Gauss-Seidel
projection, with the experiment drivers used to check them."""

from .errors import (Diverged, LLGError, MeshMismatch, NotConverged, ParseError, ValidationError,
                     ZeroVector)
from .field import FieldContext, total_energy
from .mesh import MaterialParams, Mesh, VectorField
from .schemes import SchemeKind, SolveStats, Stepper, run, step_gspm, step_scheme_a, step_scheme_b

__version__ = "0.1.0"

__all__ = ["Diverged", "FieldContext", "LLGError", "MaterialParams", "Mesh", "MeshMismatch",
           "NotConverged", "ParseError", "SchemeKind", "SolveStats", "Stepper", "ValidationError",
           "VectorField", "ZeroVector", "run", "step_gspm", "step_scheme_a", "step_scheme_b",
           "total_energy"]
