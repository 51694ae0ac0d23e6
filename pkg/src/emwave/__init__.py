"""Wave-gauge evolution and decay diagnostics for coupled metric and
electromagnetic perturbations on a Minkowski background.

The package is organized as a library:

  tensors      symmetric 4-tensor storage, exact inverse metric
  nullframe    outgoing null frame, graded component norms
  rhs          quadratic right-hand sides of the reduced field equations
  stencils     finite-difference first/second derivatives and dissipation
  evolution    grids, states, method-of-lines integrator
  initialdata  constraint equations and Cauchy-data completion
  families     closed-form initial-data families
  zfields      commuting vector fields, jets, operator composition
  diagnostics  weighted energies, gauge/frame monitors, decay fits
  config       JSON run configuration
  snapshot     checksummed binary state files
  timeseries   deterministic CSV diagnostics
  plotting     dependency-free SVG plots
  runner       run orchestration
  cli          command-line entry points
"""

from .config import RunConfig, load_config, parse_config
from .errors import (BlowupError, ConfigError, ConvergenceError, DataError,
                     DegenerateMetricError, EmwaveError, FitError,
                     SnapshotError, StateError)
from .evolution import (EvolutionState, Grid, PhysicsOptions, SchemeParams,
                        evolve, new_state, step)
from .families import make_data
from .initialdata import CauchyState, DataSet, build_cauchy
from .runner import RunResult, run

__version__ = "0.1.0"

__all__ = [
    "BlowupError", "CauchyState", "ConfigError", "ConvergenceError",
    "DataError", "DataSet", "DegenerateMetricError", "EmwaveError",
    "EvolutionState", "FitError", "Grid", "PhysicsOptions", "RunConfig",
    "RunResult", "SchemeParams", "SnapshotError", "StateError",
    "build_cauchy", "evolve", "load_config", "make_data", "new_state",
    "parse_config", "run", "step", "__version__",
]
