"""Numeric kernels shared by the control modules: an SPD conjugate
gradient solve, Euclidean projections onto the constraint sets that
appear in the optimization problems, Dykstra's method for set
intersections, and a projected-gradient minimizer with backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InvalidBoundsError,
    InvalidRangeError,
    MaxIterationsExceededError,
    NegativeTotalError,
    NoConvergenceError,
    NonFiniteObjectiveError,
    ShapeMismatchError,
    SolverFailureError,
)

# Armijo sufficient-decrease constant and line-search depth.
_ARMIJO = 1e-4
_MAX_BACKTRACKS = 60


def solve_spd(apply, b, tol: float = 1e-12, max_iter: int | None = None) -> np.ndarray:
    """Conjugate gradients for A x = b with A symmetric positive definite.

    `apply` is either a callable v -> A v or a dense matrix.  Stops when
    the true residual satisfies ||A x - b||_2 <= tol * ||b||_2.
    """
    if not callable(apply):
        mat = np.asarray(apply, dtype=float)
        apply = lambda v: mat @ v  # noqa: E731
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = max(100, 10 * n)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    target = tol * b_norm
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    for _ in range(max_iter):
        ap = apply(p)
        curvature = float(p @ ap)
        if curvature <= 0.0:
            raise SolverFailureError("operator is not positive definite along a search direction")
        alpha = rs / curvature
        x += alpha * p
        r -= alpha * ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= target:
            # recursive residual can drift; confirm against the true one
            true_r = b - apply(x)
            true_norm = float(np.linalg.norm(true_r))
            if true_norm <= target:
                return x
            r = true_r
            rs_new = true_norm * true_norm
            p = r.copy()
            rs = rs_new
            continue
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise MaxIterationsExceededError(f"no convergence to {tol:g} relative residual in {max_iter} iterations")


# --- projections -------------------------------------------------------------


def project_box(x, lo, hi) -> np.ndarray:
    """Elementwise clamp onto {lo <= y <= hi}; bounds may be scalars."""
    x = np.asarray(x, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), x.shape)
    hi = np.broadcast_to(np.asarray(hi, dtype=float), x.shape)
    if np.any(lo > hi):
        raise InvalidBoundsError("box lower bound exceeds upper bound")
    return np.clip(x, lo, hi)


def project_budget_simplex(x, total: float, equality: bool = False) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum(y) <= total}, or onto
    {y >= 0, sum(y) = total} when equality is set.

    Water-filling: the active-budget case is y = max(x - theta, 0) with
    theta chosen so the budget binds.
    """
    x = np.asarray(x, dtype=float)
    if not np.isfinite(total) or total < 0:
        raise NegativeTotalError(f"budget must be a nonnegative real, got {total}")
    if not equality:
        y = np.clip(x, 0.0, None)
        if float(np.sum(y)) <= total:
            return y
    if total == 0.0:
        return np.zeros_like(x)
    u = np.sort(x)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, x.shape[0] + 1)
    valid = u - (css - total) / ks > 0
    rho = int(np.nonzero(valid)[0][-1])
    theta = (css[rho] - total) / (rho + 1)
    return np.clip(x - theta, 0.0, None)


def project_frobenius_ball(x, center, radius: float) -> np.ndarray:
    """Projection onto {Y : ||Y - center||_F <= radius}; works for
    vectors too, where the Frobenius norm is the Euclidean norm."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    if x.shape != center.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {center.shape} differ")
    if not np.isfinite(radius) or radius < 0:
        raise NegativeTotalError(f"radius must be a nonnegative real, got {radius}")
    delta = x - center
    norm = float(np.linalg.norm(delta))
    if norm <= radius:
        return x.copy()
    return center + delta * (radius / norm)


def project_l1_ball(x, center, radius: float) -> np.ndarray:
    """Projection onto {y : ||y - center||_1 <= radius} by
    soft-thresholding: simplex-project the magnitudes, restore signs."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    if x.shape != center.shape:
        raise ShapeMismatchError(f"shapes {x.shape} and {center.shape} differ")
    if not np.isfinite(radius) or radius < 0:
        raise NegativeTotalError(f"radius must be a nonnegative real, got {radius}")
    delta = x - center
    if float(np.sum(np.abs(delta))) <= radius:
        return x.copy()
    mags = project_budget_simplex(np.abs(delta), radius, equality=True)
    return center + np.sign(delta) * mags


def dykstra_intersection(
    x0,
    projections: Sequence[Callable[[np.ndarray], np.ndarray]],
    iters: int = 1000,
    tol: float = 1e-7,
) -> np.ndarray:
    """Dykstra's alternating method: projection onto an intersection of
    closed convex sets, given projections onto each set.

    Converged when the corrections stop moving between sweeps AND every
    single-set projection moves the current point by at most tol
    (max-norm).  Feasibility alone is not enough: the iterate can sit
    inside the intersection while corrections still carry it toward the
    true projection.  Raises NoConvergenceError past `iters` sweeps.
    """
    x = np.asarray(x0, dtype=float).copy()
    if not projections:
        return x
    corrections = [np.zeros_like(x) for _ in projections]
    for _ in range(iters):
        drift = 0.0
        for idx, proj in enumerate(projections):
            shifted = x + corrections[idx]
            y = proj(shifted)
            new_corr = shifted - y
            drift = max(drift, float(np.max(np.abs(new_corr - corrections[idx]))))
            corrections[idx] = new_corr
            x = y
        if drift <= tol:
            worst = max(float(np.max(np.abs(proj(x) - x))) for proj in projections)
            if worst <= tol:
                return x
    raise NoConvergenceError(f"not within {tol:g} of every set after {iters} sweeps")


# --- minimizer ---------------------------------------------------------------


@dataclass(frozen=True)
class ProjectedGradientConfig:
    step_size: float = 1.0
    max_iters: int = 500
    grad_tol: float = 1e-8
    objective_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.step_size <= 0 or self.grad_tol <= 0 or self.objective_tol <= 0:
            raise InvalidRangeError("step_size, grad_tol, objective_tol must all be positive")
        if self.max_iters < 1:
            raise InvalidRangeError(f"max_iters must be at least 1, got {self.max_iters}")


def projected_gradient_minimize(
    f: Callable[[np.ndarray], tuple[float, np.ndarray]],
    project: Callable[[np.ndarray], np.ndarray],
    x0,
    cfg: ProjectedGradientConfig | None = None,
) -> tuple[np.ndarray, list[float]]:
    """Minimize f over the set `project` maps onto.

    f returns (value, gradient).  Steps follow the projection arc with
    Armijo backtracking, so the returned objective trace is
    non-increasing.  Terminates when the projected-gradient displacement
    falls below grad_tol, the relative objective change falls below
    objective_tol, or max_iters is reached.
    """
    if cfg is None:
        cfg = ProjectedGradientConfig()
    x = project(np.asarray(x0, dtype=float))
    val, grad = f(x)
    _require_finite(val, grad)
    trace = [float(val)]
    for _ in range(cfg.max_iters):
        step = cfg.step_size
        full = project(x - step * grad)
        if float(np.max(np.abs(full - x))) <= cfg.grad_tol * step:
            break
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            cand = full if step == cfg.step_size else project(x - step * grad)
            disp = cand - x
            disp_sq = float(np.vdot(disp, disp))
            cval, cgrad = f(cand)
            _require_finite(cval, cgrad)
            if cval <= val - (_ARMIJO / step) * disp_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improved = val - cval
        x, val, grad = cand, cval, cgrad
        trace.append(float(val))
        if improved <= cfg.objective_tol * max(1.0, abs(val)):
            break
    return x, trace


def _require_finite(val: float, grad: np.ndarray) -> None:
    if not np.isfinite(val) or not np.all(np.isfinite(grad)):
        raise NonFiniteObjectiveError("objective or gradient is not finite")
