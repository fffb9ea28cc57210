"""Sequential assembly of 2x4 brick primitives into 3D target shapes.

The library couples an integer stud lattice (feasible placements, overlap
and connection rules) with two evaluation functions (target occupiability
and static stability) and searches the placement space step by step with
multi-objective Bayesian optimization over Gaussian-process surrogates.
"""

from ._backend import BACKEND_NAME, available_backends
from .lattice import (
    Combination,
    GridBounds,
    Primitive,
    connects,
    enumerate_attachments,
    footprint,
    overlaps,
    plan_overlap_cells,
    sample_attachments,
)
from .occupiability import (
    OccupiabilityGrid,
    TargetShape,
    connected_studs,
    depth,
    height,
    occupiability_score,
    width,
)
from .stability import StabilityConfig, stability_penalty
from .gp import GpHyperparams, GpModel, encode, fit, matern52, posterior
from .bo import BoConfig, Observation, SaturationError, query_candidate, scalarized_acquisition, select_next, ucb
from .assembler import AssemblyConfig, AssemblyTrace, assemble, assemble_explicit, count_combinations

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "available_backends",
    "Primitive",
    "Combination",
    "GridBounds",
    "footprint",
    "overlaps",
    "connects",
    "plan_overlap_cells",
    "enumerate_attachments",
    "sample_attachments",
    "TargetShape",
    "OccupiabilityGrid",
    "occupiability_score",
    "height",
    "width",
    "depth",
    "connected_studs",
    "StabilityConfig",
    "stability_penalty",
    "GpHyperparams",
    "GpModel",
    "encode",
    "matern52",
    "fit",
    "posterior",
    "BoConfig",
    "Observation",
    "SaturationError",
    "ucb",
    "scalarized_acquisition",
    "query_candidate",
    "select_next",
    "AssemblyConfig",
    "AssemblyTrace",
    "assemble",
    "assemble_explicit",
    "count_combinations",
]
