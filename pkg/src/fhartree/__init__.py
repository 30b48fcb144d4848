"""Pseudospectral toolkit for a focusing fractional Hartree equation.

Ground states, sharp-constant and threshold identities, split-step time
evolution with blow-up/dispersal classification, and virial diagnostics,
all on a periodic box.
"""

from .config import ConfigError, RunConfig, SweepSpec, load_config
from .evolution import RunRecord, StepperConfig, evolve, invariance_audit
from .functionals import (
    InvariantPair,
    SetMembership,
    classify_membership,
    energy,
    invariant_pair,
    mass,
)
from .ground_state import (
    GroundState,
    NonConvergenceError,
    SolverOptions,
    solve_ground_state,
)
from .params import PhysParams
from .snapshots import read_snapshot, write_snapshot
from .spectral import (
    CONVENTION_TAG,
    GridSpec,
    MultiplierSet,
    SpectralField,
    make_grid,
    make_multipliers,
    parseval_weight,
)

__version__ = "0.1.0"

__all__ = [
    "CONVENTION_TAG",
    "ConfigError",
    "GridSpec",
    "GroundState",
    "InvariantPair",
    "MultiplierSet",
    "NonConvergenceError",
    "PhysParams",
    "RunConfig",
    "RunRecord",
    "SetMembership",
    "SolverOptions",
    "SpectralField",
    "StepperConfig",
    "SweepSpec",
    "classify_membership",
    "energy",
    "evolve",
    "invariance_audit",
    "invariant_pair",
    "load_config",
    "make_grid",
    "make_multipliers",
    "mass",
    "parseval_weight",
    "read_snapshot",
    "solve_ground_state",
    "write_snapshot",
    "__version__",
]
