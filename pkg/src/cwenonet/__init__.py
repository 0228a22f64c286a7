"""Third order CWENO finite volume schemes for networks of conservation laws."""
from .cweno import (PARAM_SETS, BoundaryStencil, ParamSet, QuadPoly, get_param_set,
                    reconstruct_boundary, reconstruct_interior, validate_conditions)
from .fv import BoundaryClosure, EdgeGrid, EdgeState, TimeStepper, reconstruct_edge
from .harness import (SCENARIOS, ConvergenceTable, convergence_study, reconstruction_study,
                      run_scenario)
from .models import EulerModel, ShallowWaterModel, TrafficModel
from .network import Network, NodeSpec, simulate

__version__ = "0.1.0"

__all__ = [
    "PARAM_SETS", "BoundaryStencil", "ParamSet", "QuadPoly", "get_param_set",
    "reconstruct_boundary", "reconstruct_interior", "validate_conditions",
    "BoundaryClosure", "EdgeGrid", "EdgeState", "TimeStepper", "reconstruct_edge",
    "SCENARIOS", "ConvergenceTable", "convergence_study", "reconstruction_study",
    "run_scenario", "EulerModel", "ShallowWaterModel", "TrafficModel",
    "Network", "NodeSpec", "simulate",
]
