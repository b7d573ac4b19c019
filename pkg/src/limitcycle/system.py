"""Collocation form of a forced periodic system.

A nonautonomous system x' = f(x, omega * tau) with 2*pi-periodic forcing
is rewritten on the phase variable t = omega * tau as omega * dx/dt =
f(x, t).  Sampling on an odd equispaced grid and replacing d/dt by the
spectral matrix D turns the search for a periodic orbit into a nonlinear
algebraic system over the N*m node values,

    R(X) = omega_eff * (I_m kron D) X - F(X) = 0,

where X stacks the components one after the other (component-major) and
omega_eff = omega / s accounts for subharmonic (period-s) responses: the
grid then spans s forcing periods and f is fed the wrapped phase s * t_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .spectral import DiffMatrix, NodeGrid, diff_matrix_equispaced

__all__ = [
    "PeriodicSystem",
    "CollocationProblem",
    "RhsEvaluationError",
    "flatten",
    "unflatten",
    "residual",
    "rhs_stack",
    "jacobian",
    "node_derivatives",
]

_SQRT_EPS = float(np.sqrt(np.finfo(float).eps))


class RhsEvaluationError(RuntimeError):
    """Right-hand-side evaluation failed at a collocation node."""

    def __init__(self, node: int, message: str = ""):
        self.node = node
        super().__init__(message or f"rhs evaluation failed at node index {node}")


@dataclass(frozen=True)
class PeriodicSystem:
    """First-order system x' = f(x, t) with 2*pi-periodic forcing phase t.

    rhs(x, t, params) -> m-vector, jac(x, t, params) -> (m, m) array of
    partials d f_k / d x_k' (optional; finite differences are used when
    absent).  ``subharmonic`` s > 1 requests a response whose period is s
    forcing periods.
    """

    dim: int
    rhs: Callable[[np.ndarray, float, Any], np.ndarray]
    omega: float
    jac: Callable[[np.ndarray, float, Any], np.ndarray] | None = None
    params: Any = None
    subharmonic: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"system dimension must be >= 1, got {self.dim}")
        if not (self.omega > 0):
            raise ValueError(f"forcing frequency must be > 0, got {self.omega}")
        if self.subharmonic < 1:
            raise ValueError(
                f"subharmonic order must be a positive integer, got {self.subharmonic}"
            )


def flatten(table: np.ndarray) -> np.ndarray:
    """Stack an (m, N) node-value table into a component-major flat vector."""
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"state table must be 2-d (m, N), got shape {arr.shape}")
    return arr.reshape(-1).copy()


def unflatten(X: np.ndarray, m: int, N: int) -> np.ndarray:
    """Reshape a component-major flat vector back into an (m, N) table."""
    arr = np.asarray(X, dtype=float)
    if arr.shape != (m * N,):
        raise ValueError(
            f"flat state has shape {arr.shape}, expected ({m * N},) for m={m}, N={N}"
        )
    return arr.reshape(m, N)


def _wrap_phase(t: np.ndarray) -> np.ndarray:
    """Wrap phases into (-pi, pi]."""
    w = np.mod(t, 2.0 * np.pi)
    return np.where(w > np.pi, w - 2.0 * np.pi, w)


@dataclass(frozen=True)
class CollocationProblem:
    """A PeriodicSystem discretized on a grid, ready for Newton iteration."""

    system: PeriodicSystem
    grid: NodeGrid
    D: DiffMatrix
    omega_eff: float
    forcing_phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.forcing_phases.setflags(write=False)

    @classmethod
    def build(cls, system: PeriodicSystem, N: int) -> "CollocationProblem":
        D = diff_matrix_equispaced(N)
        s = system.subharmonic
        if s == 1:
            phases = D.grid.nodes.copy()
        else:
            phases = _wrap_phase(s * D.grid.nodes)
        return cls(system=system, grid=D.grid, D=D,
                   omega_eff=system.omega / s, forcing_phases=phases)

    @property
    def size(self) -> int:
        return self.system.dim * self.grid.size


def _eval_rhs_table(problem: CollocationProblem, table: np.ndarray) -> np.ndarray:
    system = problem.system
    N = problem.grid.size
    F = np.empty_like(table)
    phases = problem.forcing_phases
    rhs = system.rhs
    params = system.params
    for j in range(N):
        try:
            F[:, j] = rhs(table[:, j], phases[j], params)
        except Exception as exc:
            raise RhsEvaluationError(j, f"rhs evaluation failed at node index {j}: {exc}") from exc
    return F


def rhs_stack(problem: CollocationProblem, X: np.ndarray) -> np.ndarray:
    """Evaluate f at every node; returns the component-major stack F(X)."""
    table = unflatten(X, problem.system.dim, problem.grid.size)
    return _eval_rhs_table(problem, table).reshape(-1)


def _derivative_table(problem: CollocationProblem, table: np.ndarray) -> np.ndarray:
    # Anchored product D @ (x - x[0]) per component: identical to D @ x
    # analytically, and constant components stay exactly in the kernel.
    shifted = table - table[:, :1]
    return shifted @ problem.D.entries.T


def residual(problem: CollocationProblem, X: np.ndarray) -> np.ndarray:
    """Collocation residual R(X) = omega_eff * (I kron D) X - F(X)."""
    table = unflatten(X, problem.system.dim, problem.grid.size)
    F = _eval_rhs_table(problem, table)
    R = problem.omega_eff * _derivative_table(problem, table) - F
    return R.reshape(-1)


def node_derivatives(problem: CollocationProblem, X: np.ndarray) -> np.ndarray:
    """Original-time derivative of the represented orbit at the nodes.

    Returns the (m, N) table omega_eff * (D x_k); for a converged solution
    this matches the rhs values at the nodes to within the residual.
    """
    table = unflatten(X, problem.system.dim, problem.grid.size)
    return problem.omega_eff * _derivative_table(problem, table)


def _jac_blocks_analytic(problem: CollocationProblem, table: np.ndarray) -> np.ndarray:
    system = problem.system
    m, N = table.shape
    blocks = np.empty((N, m, m))
    for j in range(N):
        try:
            blocks[j] = system.jac(table[:, j], problem.forcing_phases[j], system.params)
        except Exception as exc:
            raise RhsEvaluationError(j, f"jacobian evaluation failed at node index {j}: {exc}") from exc
    return blocks


def _jac_blocks_fd(problem: CollocationProblem, table: np.ndarray) -> np.ndarray:
    # Forward differences, one sweep per state component: f at node j only
    # depends on the m values at node j, so all nodes can be perturbed at
    # once.  Step per entry: sqrt(eps) * (1 + |X_i|).
    m, N = table.shape
    base = _eval_rhs_table(problem, table)
    blocks = np.empty((N, m, m))
    for kprime in range(m):
        h = _SQRT_EPS * (1.0 + np.abs(table[kprime]))
        perturbed = table.copy()
        perturbed[kprime] += h
        Fp = _eval_rhs_table(problem, perturbed)
        blocks[:, :, kprime] = ((Fp - base) / h).T
    return blocks


def jacobian(problem: CollocationProblem, X: np.ndarray, *, force_fd: bool = False) -> np.ndarray:
    """Dense Jacobian J = omega_eff * (I_m kron D) - P of the residual.

    P consists of m x m blocks of N x N diagonal matrices; block (k, k')
    carries d f_k / d x_k' at each node.  Uses the system's analytic jac
    when available unless ``force_fd`` is set.
    """
    m = problem.system.dim
    N = problem.grid.size
    table = unflatten(X, m, N)
    if problem.system.jac is not None and not force_fd:
        blocks = _jac_blocks_analytic(problem, table)
    else:
        blocks = _jac_blocks_fd(problem, table)
    J = np.kron(np.eye(m), problem.omega_eff * problem.D.entries)
    idx = np.arange(N)
    for k in range(m):
        for kprime in range(m):
            J[k * N + idx, kprime * N + idx] -= blocks[:, k, kprime]
    return J
