"""Finite volume characteristics solver for the rotating shallow water equations."""
from .bc import BoundarySpec
from .driver import RunConfig, convergence_study, init_case, run
from .fvc import PredictorConfig, fvc_step
from .mesh import Mesh, generate_rect_mesh, load_mesh
from .roe import RoeConfig, roe_step
from .swe import ConservedField, PhysParams, compute_time_step

__all__ = [
    "BoundarySpec", "ConservedField", "Mesh", "PhysParams", "PredictorConfig", "RoeConfig",
    "RunConfig", "compute_time_step", "convergence_study", "fvc_step", "generate_rect_mesh",
    "init_case", "load_mesh", "roe_step", "run",
]
