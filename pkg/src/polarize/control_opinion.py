"""Optimization over internal opinions.

Two directions: a benevolent shift that spends a budget reducing
internal opinions to cut the polarization-disagreement sum, and an
adversary that pushes k targeted opinions to an extreme in {0,1} to
maximize polarization or disagreement.  For the adversary, exact
enumeration, greedy target selection, and three ranking heuristics are
provided; all are deterministic, including their tie-breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .dynamics import as_opinion_vector
from .errors import (
    BoundViolatedError,
    InvalidRangeError,
    KTooLargeError,
    NegativeTotalError,
    TooLargeError,
)
from .graph import Graph
from .metrics import (
    MetricEvaluator,
    MetricKind,
    MetricReport,
    MetricRoute,
    as_metric_kind,
    mean_center,
    metrics_from_internal,
)
from .numkit import (
    ProjectedGradientConfig,
    dykstra_intersection,
    project_budget_simplex,
    projected_gradient_minimize,
)

_DYKSTRA_SWEEPS = 500
_DYKSTRA_TOL = 1e-9
# enumeration guard for exact attack search: C(n,k) * 2^k
_BRUTE_FORCE_LIMIT = 1_000_000
# fp allowance when enforcing the proved linear bounds
_BOUND_TOL = 1e-9

HEURISTIC_RULES = ("mean_opinion", "max_connection", "max_degree")


def _unit_interval_opinions(s, n: int | None = None) -> np.ndarray:
    s = as_opinion_vector(s, n)
    if np.any(s < 0) or np.any(s > 1):
        raise InvalidRangeError("internal opinions must lie in [0, 1]")
    return s


# --- budgeted opinion shift --------------------------------------------------


@dataclass(frozen=True, eq=False)
class ShiftProblem:
    """Reduce internal opinions by d >= 0 with sum(d) <= alpha."""

    s: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", _unit_interval_opinions(self.s))
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise NegativeTotalError(f"shift budget alpha must be nonnegative, got {self.alpha}")


class ShiftResult(NamedTuple):
    d: np.ndarray
    s_new: np.ndarray
    report: MetricReport


def minimize_pdi_shift(g: Graph, s, alpha: float, cfg: ProjectedGradientConfig | None = None) -> ShiftResult:
    """Choose the reduction d minimizing the polarization-disagreement
    sum at s - d, subject to 0 <= d <= s and sum(d) <= alpha."""
    problem = ShiftProblem(as_opinion_vector(s, g.n), float(alpha))
    s = problem.s
    if problem.alpha == 0.0:
        d = np.zeros_like(s)
        return ShiftResult(d, s.copy(), metrics_from_internal(g, s, 1.0, MetricRoute.FROM_S))
    if cfg is None:
        cfg = ProjectedGradientConfig(step_size=1.0, max_iters=5000, grad_tol=1e-11, objective_tol=1e-16)
    lap = g.laplacian()
    factor = cho_factor(lap + np.eye(g.n))

    def f(d: np.ndarray) -> tuple[float, np.ndarray]:
        centered, _ = mean_center(s - d)
        u = cho_solve(factor, centered)
        uc, _ = mean_center(u)
        return float(centered @ u), -2.0 * uc

    def proj_box(d: np.ndarray) -> np.ndarray:
        return np.clip(d, 0.0, s)

    def proj_budget(d: np.ndarray) -> np.ndarray:
        return project_budget_simplex(d, problem.alpha)

    def project(d: np.ndarray) -> np.ndarray:
        return dykstra_intersection(d, [proj_box, proj_budget], iters=_DYKSTRA_SWEEPS, tol=_DYKSTRA_TOL)

    d_star, _ = projected_gradient_minimize(f, project, np.zeros_like(s), cfg)
    d_star = np.clip(d_star, 0.0, s)
    s_new = s - d_star
    return ShiftResult(d_star, s_new, metrics_from_internal(g, s_new, 1.0, MetricRoute.FROM_S))


# --- adversarial extreme-setting attacks -------------------------------------


@dataclass(frozen=True)
class AttackPlan:
    """Targets and extreme values chosen by one attack procedure.

    omega lists targets in selection order; values[i] is the opinion
    assigned to omega[i].  objective_trace holds the objective after
    each selection step (a single entry for exhaustive search).
    evaluations counts objective calls made by the search itself, and
    hamming is the number of targets whose value actually changed.
    """

    kind: MetricKind
    omega: tuple[int, ...]
    values: tuple[float, ...]
    objective_trace: tuple[float, ...]
    baseline: float
    objective: float
    evaluations: int
    hamming: int

    def apply(self, s_hat) -> np.ndarray:
        s = as_opinion_vector(s_hat).copy()
        for j, v in zip(self.omega, self.values):
            s[j] = v
        return s

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "omega": list(self.omega),
            "values": list(self.values),
            "objective_trace": list(self.objective_trace),
            "baseline": self.baseline,
            "objective": self.objective,
            "evaluations": self.evaluations,
            "hamming": self.hamming,
        }


def _check_attack_budget(k: int, n: int) -> int:
    k = int(k)
    if k < 0:
        raise InvalidRangeError(f"target budget k must be nonnegative, got {k}")
    if k > n:
        raise KTooLargeError(f"target budget k={k} exceeds node count {n}")
    return k


def _hamming(s_hat: np.ndarray, omega: list[int], values: list[float]) -> int:
    return sum(1 for j, v in zip(omega, values) if s_hat[j] != v)


def brute_force_attack(g: Graph, s_hat, k: int, objective_kind) -> AttackPlan:
    """Exact maximization over all k-subsets and extreme assignments.

    Guarded at C(n,k) * 2^k <= 1e6 enumerations.  Ties resolve to the
    lexicographically smallest (omega, values).
    """
    kind = as_metric_kind(objective_kind)
    s = _unit_interval_opinions(s_hat, g.n)
    k = _check_attack_budget(k, g.n)
    total = math.comb(g.n, k) * 2**k
    if total > _BRUTE_FORCE_LIMIT:
        raise TooLargeError(f"{total} enumerations exceed the {_BRUTE_FORCE_LIMIT} guard")
    ev = MetricEvaluator(g)
    baseline = ev.objective(kind, s)
    if k == 0:
        return AttackPlan(kind, (), (), (), baseline, baseline, 0, 0)
    counted_from = ev.evaluations
    best_val = -np.inf
    best: tuple[tuple[int, ...], tuple[float, ...]] | None = None
    scratch = s.copy()
    for omega in combinations(range(g.n), k):
        idx = list(omega)
        for values in product((0.0, 1.0), repeat=k):
            scratch[idx] = values
            val = ev.objective(kind, scratch)
            if val > best_val:
                best_val = val
                best = (omega, values)
        scratch[idx] = s[idx]
    omega, values = best
    return AttackPlan(
        kind,
        omega,
        values,
        (best_val,),
        baseline,
        best_val,
        ev.evaluations - counted_from,
        _hamming(s, list(omega), list(values)),
    )


def greedy_attack(g: Graph, s_hat, k: int, objective_kind) -> AttackPlan:
    """Greedy target selection: k passes, each evaluating both extremes
    for every untargeted node and keeping the best.

    Comparisons use >=, so among ties the later candidate wins: value 1
    beats value 0 at equal objective, and a larger index beats a
    smaller one.  Exactly 2 * sum_{i=0}^{k-1} (n - i) objective calls.
    """
    kind = as_metric_kind(objective_kind)
    s = _unit_interval_opinions(s_hat, g.n)
    k = _check_attack_budget(k, g.n)
    ev = MetricEvaluator(g)
    baseline = ev.objective(kind, s)
    counted_from = ev.evaluations
    current = s.copy()
    targeted = np.zeros(g.n, dtype=bool)
    omega: list[int] = []
    values: list[float] = []
    trace: list[float] = []
    for _ in range(k):
        best_val = 0.0
        best_j = 0
        best_v = 0.0
        for j in range(g.n):
            if targeted[j]:
                continue
            saved = current[j]
            for v in (0.0, 1.0):
                current[j] = v
                val = ev.objective(kind, current)
                if val >= best_val:
                    best_val = val
                    best_j = j
                    best_v = v
            current[j] = saved
        omega.append(best_j)
        values.append(best_v)
        targeted[best_j] = True
        current[best_j] = best_v
        trace.append(best_val)
    objective = trace[-1] if trace else baseline
    return AttackPlan(
        kind,
        tuple(omega),
        tuple(values),
        tuple(trace),
        baseline,
        objective,
        ev.evaluations - counted_from,
        _hamming(s, omega, values),
    )


def heuristic_attack(g: Graph, s_hat, k: int, objective_kind, rule: str) -> AttackPlan:
    """Pick k targets by a ranking rule, then assign extremes greedily
    in selection order.

    Rules: mean_opinion targets opinions closest to the mean;
    max_connection targets the most incident edges; max_degree targets
    the largest weighted degree.  Rank ties go to the smaller index.
    """
    kind = as_metric_kind(objective_kind)
    s = _unit_interval_opinions(s_hat, g.n)
    k = _check_attack_budget(k, g.n)
    if rule not in HEURISTIC_RULES:
        raise InvalidRangeError(f"unknown heuristic rule {rule!r}; expected one of {HEURISTIC_RULES}")
    if rule == "mean_opinion":
        score = np.abs(s - s.mean())
        order = sorted(range(g.n), key=lambda i: (score[i], i))
    elif rule == "max_connection":
        counts = g.neighbor_counts()
        order = sorted(range(g.n), key=lambda i: (-counts[i], i))
    else:
        degs = g.degrees()
        order = sorted(range(g.n), key=lambda i: (-degs[i], i))
    selected = order[:k]
    ev = MetricEvaluator(g)
    baseline = ev.objective(kind, s)
    counted_from = ev.evaluations
    current = s.copy()
    values: list[float] = []
    trace: list[float] = []
    for j in selected:
        current[j] = 0.0
        val0 = ev.objective(kind, current)
        current[j] = 1.0
        val1 = ev.objective(kind, current)
        v = 1.0 if val1 >= val0 else 0.0
        current[j] = v
        values.append(v)
        trace.append(max(val0, val1))
    objective = trace[-1] if trace else baseline
    return AttackPlan(
        kind,
        tuple(selected),
        tuple(values),
        tuple(trace),
        baseline,
        objective,
        ev.evaluations - counted_from,
        _hamming(s, selected, values),
    )


# --- proved linear bounds ----------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Both proved bounds evaluated for one plan: any plan touching k
    targets obeys P <= P(s_hat) + 3k and D <= D(s_hat) + 8*d_max*k."""

    k: int
    d_max: float
    polarization_value: float
    polarization_bound: float
    polarization_slack: float
    disagreement_value: float
    disagreement_bound: float
    disagreement_slack: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "d_max": self.d_max,
            "polarization": {
                "value": self.polarization_value,
                "bound": self.polarization_bound,
                "slack": self.polarization_slack,
            },
            "disagreement": {
                "value": self.disagreement_value,
                "bound": self.disagreement_bound,
                "slack": self.disagreement_slack,
            },
        }


def check_bounds(plan: AttackPlan, g: Graph, s_hat) -> BoundReport:
    """Evaluate both linear bounds for the plan; a violation raises,
    since it can only come from an implementation bug."""
    s = _unit_interval_opinions(s_hat, g.n)
    s_plan = plan.apply(s)
    k = len(plan.omega)
    d_max = float(np.max(g.degrees())) if g.n else 0.0
    ev = MetricEvaluator(g)
    p_value = ev.polarization_of(s_plan)
    p_bound = ev.polarization_of(s) + 3.0 * k
    d_value = ev.disagreement_of(s_plan)
    d_bound = ev.disagreement_of(s) + 8.0 * d_max * k
    if p_value > p_bound + _BOUND_TOL or d_value > d_bound + _BOUND_TOL:
        raise BoundViolatedError(
            f"linear bound violated: P {p_value:.6g} vs {p_bound:.6g}, D {d_value:.6g} vs {d_bound:.6g}"
        )
    return BoundReport(
        k,
        d_max,
        p_value,
        p_bound,
        p_bound - p_value,
        d_value,
        d_bound,
        d_bound - d_value,
    )
