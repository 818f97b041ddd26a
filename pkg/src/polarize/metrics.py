"""Polarization, disagreement, and their budget-weighted sum, evaluated
at the equilibrium of the averaging dynamics.

Every metric is a quadratic form in the internal opinions and can be
computed three ways: from the equilibrium vector z, from the centered
internal opinions, or straight from s with centering folded into the
quadratic form.  The routes are exposed explicitly so each can be
tested against the others.  The average-case variants are traces of the
corresponding quadratic-form matrices:

    M_P = (L+I)^-2,  M_D = (L+I)^-1 L (L+I)^-1,  M_PDI = (L+I)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import dynamics
from .dynamics import as_opinion_vector
from .errors import (
    EmptyVectorError,
    IndexOutOfRangeError,
    InvalidRangeError,
    NoSuchEdgeError,
)
from .graph import Graph


class MetricKind(str, Enum):
    POLARIZATION = "polarization"
    DISAGREEMENT = "disagreement"
    PDI = "pdi"


class MetricRoute(str, Enum):
    FROM_Z = "from_z"
    FROM_SBAR = "from_sbar"
    FROM_S = "from_s"


def as_metric_kind(kind) -> MetricKind:
    try:
        return MetricKind(kind)
    except ValueError:
        raise InvalidRangeError(f"unknown metric kind {kind!r}") from None


def as_metric_route(route) -> MetricRoute:
    try:
        return MetricRoute(route)
    except ValueError:
        raise InvalidRangeError(f"unknown metric route {route!r}") from None


@dataclass(frozen=True)
class MetricReport:
    polarization: float
    disagreement: float
    pdi: float
    mu: float
    route: MetricRoute

    def to_dict(self) -> dict:
        return {
            "polarization": self.polarization,
            "disagreement": self.disagreement,
            "pdi": self.pdi,
            "mu": self.mu,
            "route": self.route.value,
        }


# --- elementary metrics ------------------------------------------------------


def mean_center(v) -> tuple[np.ndarray, float]:
    """Return (v - mean, mean).  The centered part sums to ~0."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise EmptyVectorError("cannot center an empty vector")
    mean = float(np.mean(v))
    return v - mean, mean


def polarization(z) -> float:
    """Variance-style spread: sum of squared deviations from the mean."""
    centered, _ = mean_center(z)
    return float(centered @ centered)


def disagreement(g: Graph, z) -> float:
    """Weighted sum of squared opinion gaps over the edges."""
    z = as_opinion_vector(z, g.n)
    ii, jj, ww = g.edge_arrays()
    if ii.size == 0:
        return 0.0
    gaps = z[ii] - z[jj]
    return float(np.sum(ww * gaps * gaps))


def local_disagreement(g: Graph, z, i: int, j: int) -> float:
    """Single-edge contribution W_ij (z_i - z_j)^2."""
    z = as_opinion_vector(z, g.n)
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise IndexOutOfRangeError(f"nodes ({i},{j}) outside 0..{g.n - 1}")
    w = g.edge_weight(i, j)
    if w is None:
        raise NoSuchEdgeError(f"no edge between {i} and {j}")
    return float(w * (z[i] - z[j]) ** 2)


# --- quadratic-form machinery ------------------------------------------------


def _resolvent_factor(g: Graph):
    m = g.laplacian()
    m[np.diag_indices_from(m)] += 1.0
    return cho_factor(m)


def metric_matrix(g: Graph, kind) -> np.ndarray:
    """Dense quadratic-form matrix M_* for the requested metric."""
    kind = as_metric_kind(kind)
    factor = _resolvent_factor(g)
    resolvent = cho_solve(factor, np.eye(g.n))
    if kind is MetricKind.PDI:
        return resolvent
    if kind is MetricKind.POLARIZATION:
        return resolvent @ resolvent
    return resolvent @ g.laplacian() @ resolvent


def acr(g: Graph, kind) -> float:
    """Average-case conflict risk: the metric's expected value under
    independent centered unit-variance internal opinions, Tr(M_*)."""
    return float(np.trace(metric_matrix(g, kind)))


def metrics_from_internal(g: Graph, s, mu: float = 1.0, route=MetricRoute.FROM_Z) -> MetricReport:
    """Evaluate all three metrics at the equilibrium reached from s.

    route picks the computation path: from_z solves for the equilibrium
    and applies the definitional formulas; from_sbar evaluates the
    quadratic forms at the centered opinions; from_s uses the
    projector-wrapped forms directly on s.  The paths agree to
    rounding; the weighted sum uses pdi = P + mu*D when mu != 1.
    """
    route = as_metric_route(route)
    if not np.isfinite(mu) or mu < 0:
        raise InvalidRangeError(f"mu must be a nonnegative real, got {mu}")
    s = as_opinion_vector(s, g.n)
    lap = g.laplacian()

    if route is MetricRoute.FROM_Z:
        z = dynamics.equilibrium(g, s)
        p = polarization(z)
        d = disagreement(g, z)
        if mu == 1.0:
            zc, _ = mean_center(z)
            pdi = float(zc @ (lap @ zc) + zc @ zc)
        else:
            pdi = p + mu * d
        return MetricReport(p, d, pdi, mu, route)

    factor = _resolvent_factor(g)
    if route is MetricRoute.FROM_SBAR:
        sbar, _ = mean_center(s)
        y = cho_solve(factor, sbar)
        p = float(y @ y)
        d = float(y @ (lap @ y))
        pdi = float(sbar @ y) if mu == 1.0 else p + mu * d
        return MetricReport(p, d, pdi, mu, route)

    # from_s: center only through the projector inside the form
    y = cho_solve(factor, s)
    yc, _ = mean_center(y)
    p = float(yc @ yc)
    d = float(y @ (lap @ y))
    if mu == 1.0:
        u = cho_solve(factor, mean_center(s)[0])
        uc, _ = mean_center(u)
        pdi = float(s @ uc)
    else:
        pdi = p + mu * d
    return MetricReport(p, d, pdi, mu, route)


def metric_gradient(g: Graph, kind, s, mu: float = 1.0) -> np.ndarray:
    """Gradient with respect to the internal opinions of the metric's
    quadratic form (2 M_* applied through the centering projector)."""
    kind = as_metric_kind(kind)
    s = as_opinion_vector(s, g.n)
    factor = _resolvent_factor(g)
    y = cho_solve(factor, s)
    if kind is MetricKind.POLARIZATION:
        return 2.0 * cho_solve(factor, mean_center(y)[0])
    if kind is MetricKind.DISAGREEMENT:
        return 2.0 * cho_solve(factor, g.laplacian() @ y)
    grad_p = 2.0 * cho_solve(factor, mean_center(y)[0])
    grad_d = 2.0 * cho_solve(factor, g.laplacian() @ y)
    return grad_p + mu * grad_d


class MetricEvaluator:
    """Caches one graph's dense resolvent for repeated metric
    evaluations and counts them, so search procedures can report an
    exact evaluation budget."""

    def __init__(self, g: Graph):
        self.graph = g
        self._lap = g.laplacian()
        m = self._lap + np.eye(g.n)
        self._resolvent = cho_solve(cho_factor(m), np.eye(g.n))
        self.evaluations = 0

    def equilibrium_of(self, s: np.ndarray) -> np.ndarray:
        return self._resolvent @ s

    def polarization_of(self, s: np.ndarray) -> float:
        self.evaluations += 1
        y = self._resolvent @ s
        yc = y - y.mean()
        return float(yc @ yc)

    def disagreement_of(self, s: np.ndarray) -> float:
        self.evaluations += 1
        y = self._resolvent @ s
        return float(y @ (self._lap @ y))

    def objective(self, kind, s: np.ndarray) -> float:
        kind = as_metric_kind(kind)
        if kind is MetricKind.POLARIZATION:
            return self.polarization_of(s)
        if kind is MetricKind.DISAGREEMENT:
            return self.disagreement_of(s)
        raise InvalidRangeError("adversarial objectives are polarization or disagreement")
