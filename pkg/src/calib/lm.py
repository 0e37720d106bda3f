"""
Damped least squares (Levenberg-Marquardt) for the calibration problems.

Damping follows the Marquardt form (J^T J + lambda * diag(J^T J)), which keeps
steps invariant to per-parameter rescaling (focal lengths in hundreds of
pixels next to rotations in radians).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from src.errors import NonConvergence

logger = logging.getLogger(__name__)

LAMBDA_START = 1e-3
LAMBDA_FACTOR = 10.0
LAMBDA_MAX = 1e16
MAX_ITERATIONS = 100
RELATIVE_TOLERANCE = 1e-10
# Sum of squares below which the fit is exact to floating-point precision
ABSOLUTE_COST_FLOOR = 1e-24


@dataclass
class LMResult:
    x: np.ndarray
    cost: float
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0
    stalled: bool = False


def numeric_jacobian(residual_fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                     rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, one column per parameter."""
    columns = []
    for i in range(len(x)):
        h = rel_step * max(1.0, abs(x[i]))
        forward, backward = x.copy(), x.copy()
        forward[i] += h
        backward[i] -= h
        columns.append((residual_fn(forward) - residual_fn(backward)) / (2.0 * h))
    return np.column_stack(columns)


def _cost(r: np.ndarray) -> float:
    if not np.all(np.isfinite(r)):
        return np.inf
    return float(r @ r)


def _solve_step(a: np.ndarray, g: np.ndarray, lam: float) -> np.ndarray:
    damped = a + lam * np.diag(np.diag(a))
    try:
        return np.linalg.solve(damped, -g)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(damped, -g, rcond=None)[0]


def levenberg_marquardt(residual_fn: Callable[[np.ndarray], np.ndarray], x0: np.ndarray,
                        jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                        max_iterations: int = MAX_ITERATIONS) -> LMResult:
    """
    Minimize ||residual_fn(x)||^2 from x0.

    Steps that do not lower the cost are rejected, so `cost_history` (one entry
    per accepted iterate, starting with the initial cost) never increases.
    Raises NonConvergence when `max_iterations` pass without meeting the tolerance.
    """
    jacobian_fn = jacobian_fn or (lambda x: numeric_jacobian(residual_fn, x))
    x = np.array(x0, dtype=np.float64)
    r = residual_fn(x)
    cost = _cost(r)
    if not np.isfinite(cost):
        raise ValueError("initial parameters give a non-finite cost")
    history = [cost]
    lam = LAMBDA_START

    for iteration in range(1, max_iterations + 1):
        if cost <= ABSOLUTE_COST_FLOOR:
            return LMResult(x, cost, history, iteration - 1)
        j = jacobian_fn(x)
        a = j.T @ j
        g = j.T @ r

        accepted = False
        while lam < LAMBDA_MAX:
            x_new = x + _solve_step(a, g, lam)
            r_new = residual_fn(x_new)
            cost_new = _cost(r_new)
            if cost_new < cost:
                accepted = True
                lam /= LAMBDA_FACTOR
                break
            lam *= LAMBDA_FACTOR

        if not accepted:
            # No damping lowers the cost any more: a minimum to working precision
            logger.debug("LM stalled at iteration %d with cost %.6g", iteration, cost)
            return LMResult(x, cost, history, iteration, stalled=True)

        relative_change = (cost - cost_new) / cost
        x, r, cost = x_new, r_new, cost_new
        history.append(cost)
        if relative_change < RELATIVE_TOLERANCE:
            return LMResult(x, cost, history, iteration)

    raise NonConvergence(f"no convergence after {max_iterations} iterations (cost {cost:.6g})")
