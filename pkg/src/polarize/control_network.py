"""Optimization over network structure.

Three procedures: an administrator that re-weights edges to cut
disagreement at the current equilibrium while preserving every node's
total incident weight; minimization of the polarization-disagreement
sum over all graphs with a fixed Laplacian trace; and minimization of
average-case conflict risk over adjacency matrices near a reference.

All three work on the upper-triangular weight vector, so symmetry and
a zero diagonal hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .dynamics import as_opinion_vector, equilibrium
from .errors import InvalidRangeError, NegativeTotalError
from .graph import Graph
from .metrics import MetricKind, as_metric_kind, disagreement, mean_center, polarization
from .numkit import (
    ProjectedGradientConfig,
    dykstra_intersection,
    project_budget_simplex,
    project_frobenius_ball,
    project_l1_ball,
    projected_gradient_minimize,
)

# the ball/cone/affine corner can need several hundred sweeps, so the
# cap is generous; feasibility is checked in max-norm
_DYKSTRA_SWEEPS = 5000
_DYKSTRA_TOL = 1e-8
# outer-loop early exit threshold on the Frobenius change of W
_W_CHANGE_TOL = 1e-9
# pair weight above which an edge counts toward the density statistic
_DENSITY_EPS = 1e-8


@dataclass(frozen=True)
class AdminConfig:
    """Budget and solver settings for the administrator.

    epsilon is the relative Frobenius budget: the adjusted W must stay
    within epsilon * ||W_hat||_F of the input weights.
    """

    epsilon: float
    rounds: int = 10
    inner: ProjectedGradientConfig = field(
        default_factory=lambda: ProjectedGradientConfig(step_size=1.0, max_iters=80, grad_tol=1e-7, objective_tol=1e-10)
    )

    def __post_init__(self) -> None:
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidRangeError(f"epsilon must be a nonnegative real, got {self.epsilon}")
        if self.rounds < 1:
            raise InvalidRangeError(f"rounds must be at least 1, got {self.rounds}")


@dataclass(frozen=True, eq=False)
class AdminRound:
    round: int
    z: np.ndarray
    graph: Graph
    polarization: float
    disagreement: float


@dataclass(frozen=True, eq=False)
class AdminTrace:
    rounds: tuple[AdminRound, ...]
    final_graph: Graph
    final_polarization: float
    final_disagreement: float


@dataclass(frozen=True)
class StructureBudget:
    """Budgets for the two structure problems: m fixes the Laplacian
    trace, k caps the entrywise 1-norm change of W."""

    m: float
    k: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.m) or self.m <= 0:
            raise InvalidRangeError(f"trace budget m must be positive, got {self.m}")
        if not np.isfinite(self.k) or self.k < 0:
            raise NegativeTotalError(f"1-norm budget k must be nonnegative, got {self.k}")


@dataclass(frozen=True)
class DesignResult:
    graph: Graph
    objective: float
    objective_trace: tuple[float, ...]
    edge_density: float


# --- pair-vector helpers -----------------------------------------------------


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def _pair_vector(g: Graph) -> np.ndarray:
    iu, ju = _pairs(g.n)
    return g.adjacency()[iu, ju]

def _graph_from_pairs(n: int, w: np.ndarray) -> Graph:
    iu, ju = _pairs(n)
    w = np.clip(w, 0.0, None)
    edges = tuple(
        (int(i), int(j), float(x)) for i, j, x in zip(iu, ju, w) if x > 0.0
    )
    return Graph(n, edges)


def _laplacian_from_pairs(n: int, w: np.ndarray, iu: np.ndarray, ju: np.ndarray) -> np.ndarray:
    adj = np.zeros((n, n))
    adj[iu, ju] = w
    adj += adj.T
    return np.diag(adj.sum(axis=1)) - adj


def _edge_density(w: np.ndarray) -> float:
    if w.size == 0:
        return 0.0
    return float(np.count_nonzero(w > _DENSITY_EPS)) / w.size


def _incidence(n: int) -> np.ndarray:
    iu, ju = _pairs(n)
    cols = np.arange(iu.size)
    a = np.zeros((n, iu.size))
    a[iu, cols] = 1.0
    a[ju, cols] = 1.0
    return a


# --- administrator -----------------------------------------------------------


def admin_adjust(g: Graph, z, cfg: AdminConfig) -> Graph:
    """Re-weight edges to minimize disagreement at fixed opinions z.

    Feasible set: symmetric nonnegative W with every row sum equal to
    the input's and ||W - W_hat||_F within epsilon * ||W_hat||_F.  The
    objective is linear in the pair weights (coefficients are squared
    opinion gaps), so the minimizer sits on the boundary.
    """
    z = as_opinion_vector(z, g.n)
    if g.n < 2 or cfg.epsilon == 0.0:
        return g
    iu, ju = _pairs(g.n)
    gaps = z[iu] - z[ju]
    q = gaps * gaps
    if not np.any(q > 0):
        return g
    w_hat = _pair_vector(g)
    # ||W - W_hat||_F = sqrt(2) * pair-vector distance, and the budget
    # epsilon * ||W_hat||_F carries the same factor, so it cancels.
    radius = cfg.epsilon * float(np.linalg.norm(w_hat))
    if radius == 0.0:
        return g
    row_targets = g.degrees()
    a = _incidence(g.n)
    gram_pinv = np.linalg.pinv(a @ a.T)

    def proj_rowsums(w: np.ndarray) -> np.ndarray:
        return w - a.T @ (gram_pinv @ (a @ w - row_targets))

    def proj_ball(w: np.ndarray) -> np.ndarray:
        return project_frobenius_ball(w, w_hat, radius)

    def proj_nonneg(w: np.ndarray) -> np.ndarray:
        return np.clip(w, 0.0, None)

    def project(w: np.ndarray) -> np.ndarray:
        return dykstra_intersection(
            w, [proj_rowsums, proj_ball, proj_nonneg], iters=_DYKSTRA_SWEEPS, tol=_DYKSTRA_TOL
        )

    def f(w: np.ndarray) -> tuple[float, np.ndarray]:
        return float(q @ w), q

    w_star, _ = projected_gradient_minimize(f, project, w_hat, cfg.inner)
    return _graph_from_pairs(g.n, w_star)


def admin_loop(g0: Graph, s, cfg: AdminConfig) -> AdminTrace:
    """Alternate equilibrium computation and weight adjustment.

    Each round records the equilibrium under the graph entering the
    round, the adjusted graph, and the polarization/disagreement pair
    at those opinions.  Stops early once the weights move by less than
    1e-9 in Frobenius norm.  Final metrics re-equilibrate on the last
    graph.
    """
    s = as_opinion_vector(s, g0.n)
    g = g0
    records: list[AdminRound] = []
    for rnd in range(1, cfg.rounds + 1):
        z = equilibrium(g, s)
        adjusted = admin_adjust(g, z, cfg)
        records.append(AdminRound(rnd, z, adjusted, polarization(z), disagreement(adjusted, z)))
        change = float(np.linalg.norm(adjusted.adjacency() - g.adjacency()))
        g = adjusted
        if change < _W_CHANGE_TOL:
            break
    z_final = equilibrium(g, s)
    return AdminTrace(tuple(records), g, polarization(z_final), disagreement(g, z_final))


# --- structure optimizers ----------------------------------------------------


def minimize_pdi_over_laplacian(s, m: float, cfg: ProjectedGradientConfig | None = None) -> DesignResult:
    """Minimize the polarization-disagreement sum over all weighted
    graphs whose Laplacian trace equals m.

    The trace constraint is a scaled simplex on the pair weights
    (Tr(L) = 2 * sum of weights), so projection is exact.
    """
    s = as_opinion_vector(s)
    n = s.shape[0]
    if not np.isfinite(m) or m <= 0:
        raise InvalidRangeError(f"trace budget m must be positive, got {m}")
    if n < 2:
        raise InvalidRangeError("need at least 2 nodes to place edges")
    if cfg is None:
        cfg = ProjectedGradientConfig(step_size=1.0, max_iters=3000, grad_tol=1e-10, objective_tol=1e-15)
    iu, ju = _pairs(n)
    budget = m / 2.0
    w0 = np.full(iu.size, budget / iu.size)
    sbar, _ = mean_center(s)
    if not np.any(sbar != 0.0):
        return DesignResult(_graph_from_pairs(n, w0), 0.0, (0.0,), _edge_density(w0))
    eye = np.eye(n)

    def f(w: np.ndarray) -> tuple[float, np.ndarray]:
        lap = _laplacian_from_pairs(n, w, iu, ju)
        y = cho_solve(cho_factor(lap + eye), sbar)
        ygaps = y[iu] - y[ju]
        return float(sbar @ y), -(ygaps * ygaps)

    def project(w: np.ndarray) -> np.ndarray:
        return project_budget_simplex(w, budget, equality=True)

    w_star, trace = projected_gradient_minimize(f, project, w0, cfg)
    return DesignResult(_graph_from_pairs(n, w_star), trace[-1], tuple(trace), _edge_density(w_star))


def minimize_acr(w_hat: Graph, kind, k: float, cfg: ProjectedGradientConfig | None = None) -> DesignResult:
    """Minimize average-case conflict risk near a reference adjacency.

    Feasible set: symmetric W with entries in [0,1] and entrywise
    1-norm change from the reference at most k.  Only the pdi kind is
    convex; for the others the result is a local stationary point.
    """
    kind = as_metric_kind(kind)
    if not np.isfinite(k) or k < 0:
        raise NegativeTotalError(f"1-norm budget k must be nonnegative, got {k}")
    n = w_hat.n
    iu, ju = _pairs(n)
    pair_hat = _pair_vector(w_hat)
    if np.any(pair_hat > 1.0):
        # outside the [0,1] adjacency class the feasible set can be empty
        raise InvalidRangeError("reference weights must lie in [0, 1]")
    eye = np.eye(n)

    def f(w: np.ndarray) -> tuple[float, np.ndarray]:
        lap = _laplacian_from_pairs(n, w, iu, ju)
        r = np.linalg.inv(lap + eye)
        r2 = r @ r
        quad2 = r2[iu, iu] - 2.0 * r2[iu, ju] + r2[ju, ju]
        if kind is MetricKind.PDI:
            return float(np.trace(r)), -quad2
        r3 = r2 @ r
        quad3 = r3[iu, iu] - 2.0 * r3[iu, ju] + r3[ju, ju]
        if kind is MetricKind.POLARIZATION:
            return float(np.trace(r2)), -2.0 * quad3
        return float(np.trace(lap @ r2)), -quad2 + 2.0 * quad3

    if k == 0.0 or iu.size == 0:
        val, _ = f(pair_hat)
        return DesignResult(w_hat, val, (val,), _edge_density(pair_hat))
    if cfg is None:
        cfg = ProjectedGradientConfig(step_size=2.0, max_iters=2000, grad_tol=1e-10, objective_tol=1e-15)
    # entrywise 1-norm over the full matrix counts each pair twice
    radius = k / 2.0

    def proj_box01(w: np.ndarray) -> np.ndarray:
        return np.clip(w, 0.0, 1.0)

    def proj_ball(w: np.ndarray) -> np.ndarray:
        return project_l1_ball(w, pair_hat, radius)

    def project(w: np.ndarray) -> np.ndarray:
        return dykstra_intersection(w, [proj_box01, proj_ball], iters=_DYKSTRA_SWEEPS, tol=_DYKSTRA_TOL)

    w_star, trace = projected_gradient_minimize(f, project, pair_hat, cfg)
    return DesignResult(_graph_from_pairs(n, w_star), trace[-1], tuple(trace), _edge_density(w_star))
