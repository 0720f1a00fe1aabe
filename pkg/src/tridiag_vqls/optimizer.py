"""Derivative-free Nelder-Mead simplex minimisation with an evaluation budget."""

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from tridiag_vqls.errors import VqlsError

logger = structlog.get_logger()

REFLECTION = 1.0
EXPANSION = 2.0
CONTRACTION = 0.5
SHRINK = 0.5


class NonFiniteObjectiveError(VqlsError):
    """Raised when the objective returns NaN or infinity."""

    def __init__(self, x: Sequence[float], value: float):
        self.x = tuple(float(v) for v in x)
        self.value = value
        super().__init__(f"Objective returned {value} at {list(self.x)}")


class OptimizerSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_evals: int = Field(500, ge=1, description="Objective evaluation budget")
    tol: float = Field(1e-6, gt=0, description="Stop when the simplex cost spread falls below this")
    xtol: float = Field(1e-4, gt=0, description="Stop only once the simplex is also narrower than this in every coordinate")
    initial_step: float = Field(0.5, gt=0, description="Edge length of the initial simplex")
    seed: int = Field(0, ge=0, description="Seed for the starting point")


class MinimizeResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: Tuple[float, ...] = Field(..., description="Best point found")
    fun: float = Field(..., description="Objective value at x")
    evaluations: int = Field(..., ge=0, description="Objective evaluations used")
    iterations: int = Field(..., ge=0, description="Simplex updates performed")
    converged: bool = Field(..., description="Whether the tolerance test passed before the budget ran out")


IterationCallback = Callable[[int, np.ndarray, float], None]


class _BudgetExhausted(Exception):
    pass


class _Objective:
    def __init__(self, func: Callable[[np.ndarray], float], max_evals: int):
        self.func = func
        self.max_evals = max_evals
        self.evaluations = 0

    def __call__(self, x: np.ndarray) -> float:
        if self.evaluations >= self.max_evals:
            raise _BudgetExhausted()
        self.evaluations += 1
        value = float(self.func(x))
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(x, value)
        return value


def nelder_mead(
    func: Callable[[np.ndarray], float],
    x0: Sequence[float],
    settings: OptimizerSettings,
    callback: Optional[IterationCallback] = None,
) -> MinimizeResult:
    """Minimise ``func`` from ``x0`` with reflection 1, expansion 2, contraction 0.5 and shrink 0.5.

    ``callback(iteration, x_best, f_best)`` runs once for the initial simplex (iteration 0)
    and after every accepted simplex update.

    Raises:
        NonFiniteObjectiveError: If ``func`` returns a non-finite value.
    """
    objective = _Objective(func, settings.max_evals)
    start = np.asarray(x0, dtype=float)
    dim = start.size

    simplex: List[Tuple[np.ndarray, float]] = []
    iteration = 0
    converged = False
    reported = False

    def report() -> None:
        nonlocal reported
        reported = True
        if callback is not None:
            callback(iteration, simplex[0][0].copy(), simplex[0][1])

    try:
        simplex.append((start, objective(start)))
        for i in range(dim):
            vertex = start.copy()
            vertex[i] += settings.initial_step
            simplex.append((vertex, objective(vertex)))
        simplex.sort(key=lambda item: item[1])
        report()

        while True:
            best_x, best_f = simplex[0]
            spread = simplex[-1][1] - best_f
            size = max(float(np.max(np.abs(x - best_x))) for x, _ in simplex)
            if spread < settings.tol and size < settings.xtol:
                converged = True
                break

            worst_x, worst_f = simplex[-1]
            second_f = simplex[-2][1]
            centroid = np.mean([x for x, _ in simplex[:-1]], axis=0)

            reflected = centroid + REFLECTION * (centroid - worst_x)
            reflected_f = objective(reflected)
            if best_f <= reflected_f < second_f:
                simplex[-1] = (reflected, reflected_f)
            elif reflected_f < best_f:
                expanded = centroid + EXPANSION * (reflected - centroid)
                expanded_f = objective(expanded)
                simplex[-1] = (expanded, expanded_f) if expanded_f < reflected_f else (reflected, reflected_f)
            else:
                if reflected_f < worst_f:
                    contracted = centroid + CONTRACTION * (reflected - centroid)
                    contracted_f = objective(contracted)
                    accepted = contracted_f <= reflected_f
                else:
                    contracted = centroid + CONTRACTION * (worst_x - centroid)
                    contracted_f = objective(contracted)
                    accepted = contracted_f < worst_f
                if accepted:
                    simplex[-1] = (contracted, contracted_f)
                else:
                    shrunk = [simplex[0]]
                    for x, _ in simplex[1:]:
                        moved = best_x + SHRINK * (x - best_x)
                        shrunk.append((moved, objective(moved)))
                    simplex = shrunk

            simplex.sort(key=lambda item: item[1])
            iteration += 1
            report()
    except _BudgetExhausted:
        simplex.sort(key=lambda item: item[1])
        if not reported:
            report()

    best_x, best_f = simplex[0]
    logger.debug(
        "Nelder-Mead finished",
        converged=converged,
        evaluations=objective.evaluations,
        iterations=iteration,
        fun=best_f,
    )
    return MinimizeResult(
        x=tuple(float(v) for v in best_x),
        fun=best_f,
        evaluations=objective.evaluations,
        iterations=iteration,
        converged=converged,
    )
