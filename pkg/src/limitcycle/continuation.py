"""Parameter continuation: trace branches of periodic solutions.

A sweep marches a control parameter from ``start`` to ``end``, solving
the collocation system at each value and warm-starting Newton from the
previous converged solution.  Per-cycle extrema of any state component
are read off the trigonometric interpolant, which is what a
bifurcation diagram plots against the parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .solver import NewtonConfig, SolveResult, newton_solve
from .spectral import NodeGrid, trig_interpolate
from .system import CollocationProblem

__all__ = [
    "BranchSeedError",
    "SweepConfig",
    "Branch",
    "ExtremaPoint",
    "sweep",
    "extract_extrema",
    "extrema_along_branch",
]


class BranchSeedError(RuntimeError):
    """The sweep's initial point failed to converge."""

    def __init__(self, parameter: float):
        self.parameter = parameter
        super().__init__(
            f"initial solve did not converge at parameter value {parameter!r}"
        )


@dataclass(frozen=True)
class SweepConfig:
    """Range and stepping policy for a one-parameter sweep.

    With ``adaptive`` set, a failed solve halves the step (down to
    ``min_step``) and retries; after a success the step grows back
    toward the configured value.  ``start == end`` is allowed and
    yields a single-point branch.
    """

    parameter_name: str
    start: float
    end: float
    step: float
    adaptive: bool = True
    min_step: float | None = None

    def __post_init__(self):
        if not self.parameter_name:
            raise ValueError("parameter_name must be a nonempty identifier")
        if not (self.step > 0.0):
            raise ValueError("step must be positive")
        if self.min_step is None:
            object.__setattr__(self, "min_step", self.step / 64.0)
        if not (0.0 < self.min_step <= self.step):
            raise ValueError("min_step must lie in (0, step]")


@dataclass(frozen=True)
class Branch:
    """Converged points of one sweep, in march order.

    ``status`` is "completed" when the sweep reached ``end`` and
    "truncated" when it stopped early (step underflow, or a failure
    with adaptive stepping disabled).  Only converged points are
    stored, so parameter values are strictly monotone.
    """

    points: tuple[tuple[float, SolveResult], ...]
    provenance: str = ""
    status: str = "completed"

    @property
    def parameters(self) -> np.ndarray:
        return np.array([p for p, _ in self.points])


@dataclass(frozen=True)
class ExtremaPoint:
    """Per-cycle max/min of one component at one parameter value."""

    parameter: float
    component_index: int
    max_value: float
    min_value: float

    def __post_init__(self):
        if self.max_value < self.min_value:
            raise ValueError("max_value must be >= min_value")


def sweep(
    problem_family: Callable[[float], CollocationProblem],
    X0: np.ndarray,
    cfg: SweepConfig,
    newton_cfg: NewtonConfig | None = None,
    provenance: str = "",
) -> Branch:
    """March the parameter from start to end, warm-starting each solve.

    ``problem_family`` maps a parameter value to the collocation
    problem at that value.  Raises BranchSeedError when the very first
    solve fails; later failures truncate the branch instead.
    """
    ncfg = newton_cfg if newton_cfg is not None else NewtonConfig()
    p = float(cfg.start)
    seed = newton_solve(problem_family(p), np.asarray(X0, dtype=float), ncfg)
    if not seed.converged:
        raise BranchSeedError(p)
    points = [(p, seed)]
    X = seed.X

    if cfg.end == cfg.start:
        return Branch(tuple(points), provenance, "completed")

    direction = 1.0 if cfg.end > cfg.start else -1.0
    h = cfg.step
    while p != cfg.end:
        remaining = abs(cfg.end - p)
        trial_h = min(h, remaining)
        # land exactly on the endpoint instead of accumulating roundoff
        p_trial = cfg.end if trial_h == remaining else p + direction * trial_h
        result = newton_solve(problem_family(p_trial), X, ncfg)
        if result.converged:
            p = p_trial
            X = result.X
            points.append((p, result))
            if cfg.adaptive and h < cfg.step:
                h = min(2.0 * h, cfg.step)
        else:
            if not cfg.adaptive or trial_h <= cfg.min_step:
                return Branch(tuple(points), provenance, "truncated")
            h = max(trial_h / 2.0, cfg.min_step)
    return Branch(tuple(points), provenance, "completed")


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_refine(f, lo: float, hi: float, sign: float, tol: float = 1e-10):
    """Golden-section maximization of sign*f on [lo, hi]; returns f-value."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = sign * f(c)
    fd = sign * f(d)
    while (hi - lo) > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = sign * f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = sign * f(d)
    return sign * max(fc, fd, sign * f(0.5 * (lo + hi)))


def extract_extrema(
    grid: NodeGrid,
    solution: np.ndarray,
    component: int,
    oversample: int = 8,
) -> tuple[float, float]:
    """Per-cycle (max, min) of one component of a collocation solution.

    Samples the trigonometric interpolant on oversample*N equispaced
    phases, then sharpens the discrete extrema with golden-section
    search to a phase tolerance of 1e-10.
    """
    if oversample < 4:
        raise ValueError("oversample must be at least 4")
    X = np.asarray(solution, dtype=float).ravel()
    N = grid.size
    if X.size == 0 or X.size % N != 0:
        raise ValueError(
            f"flat state of size {X.size} is not a multiple of {N} nodes"
        )
    m = X.size // N
    if not 0 <= component < m:
        raise ValueError(f"component {component} out of range for {m} states")
    vals = X[component * N:(component + 1) * N]

    M = oversample * N
    ts = -np.pi + 2.0 * np.pi * np.arange(M) / M
    dense = trig_interpolate(grid, vals, ts)

    def f(t: float) -> float:
        return trig_interpolate(grid, vals, t)

    half = 2.0 * np.pi / M
    i_max = int(np.argmax(dense))
    i_min = int(np.argmin(dense))
    refined_max = _golden_refine(f, ts[i_max] - half, ts[i_max] + half, 1.0)
    refined_min = _golden_refine(f, ts[i_min] - half, ts[i_min] + half, -1.0)
    # the sampled value is a lower bound on the max (upper on the min)
    return (
        float(max(refined_max, dense[i_max])),
        float(min(refined_min, dense[i_min])),
    )


def extrema_along_branch(
    grid: NodeGrid,
    branch: Branch,
    component: int,
    oversample: int = 8,
) -> list[ExtremaPoint]:
    """Extrema of one component at every converged point of a branch."""
    out = []
    for p, result in branch.points:
        hi, lo = extract_extrema(grid, result.X, component, oversample)
        out.append(ExtremaPoint(p, component, hi, lo))
    return out
