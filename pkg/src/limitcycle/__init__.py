"""Spectral collocation solver for periodic steady states of forced systems."""

from .continuation import (
    Branch,
    BranchSeedError,
    ExtremaPoint,
    SweepConfig,
    extract_extrema,
    extrema_along_branch,
    sweep,
)
from .models import (
    CircuitParams,
    LinearParams,
    PendulumParams,
    PhysicalPendulum,
    circuit_outputs,
    circuit_system,
    diode_residual,
    diode_voltage,
    linear_system,
    pendulum_from_physical,
    pendulum_system,
    square_wave,
)
from .solver import NewtonConfig, SingularJacobianError, SolveResult, newton_solve
from .spectral import (
    DegenerateGridError,
    DiffMatrix,
    NodeGrid,
    apply_derivative,
    diff_matrix_equispaced,
    diff_matrix_general,
    equispaced_nodes,
    tau_weights,
    trig_interpolate,
)
from .system import (
    CollocationProblem,
    PeriodicSystem,
    RhsEvaluationError,
    flatten,
    jacobian,
    node_derivatives,
    residual,
    rhs_stack,
    unflatten,
)
from .warmstart import (
    TransientConfig,
    TransientDivergenceError,
    TransientResult,
    guess_near_pi,
    rk4_transient,
)

__all__ = [
    "Branch",
    "BranchSeedError",
    "CircuitParams",
    "CollocationProblem",
    "DegenerateGridError",
    "DiffMatrix",
    "ExtremaPoint",
    "LinearParams",
    "NewtonConfig",
    "NodeGrid",
    "PendulumParams",
    "PeriodicSystem",
    "PhysicalPendulum",
    "RhsEvaluationError",
    "SingularJacobianError",
    "SolveResult",
    "SweepConfig",
    "TransientConfig",
    "TransientDivergenceError",
    "TransientResult",
    "apply_derivative",
    "circuit_outputs",
    "circuit_system",
    "diff_matrix_equispaced",
    "diff_matrix_general",
    "diode_residual",
    "diode_voltage",
    "equispaced_nodes",
    "extract_extrema",
    "extrema_along_branch",
    "flatten",
    "guess_near_pi",
    "jacobian",
    "linear_system",
    "newton_solve",
    "node_derivatives",
    "pendulum_from_physical",
    "pendulum_system",
    "residual",
    "rhs_stack",
    "rk4_transient",
    "square_wave",
    "sweep",
    "tau_weights",
    "trig_interpolate",
    "unflatten",
]

__version__ = "0.1.0"
