"""Opinion evolution: each node repeatedly averages its fixed internal
opinion with the expressed opinions of its neighbors.

The synchronous update is

    z_i(t+1) = (s_i + sum_j W_ij z_j(t)) / (1 + d_i)

whose unique fixed point solves (L + I) z = s.  The starting point
z(0) does not affect the limit, so the iterate defaults to z(0) = s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DimensionMismatchError,
    InvalidRangeError,
    MalformedLineError,
    ShapeMismatchError,
    SolverFailureError,
)
from .graph import Graph
from .numkit import solve_spd

# Below this node count the equilibrium solve uses a dense Cholesky
# factorization; at or above it, conjugate gradients on the operator form.
DENSE_CUTOFF = 500

_EQUILIBRIUM_RTOL = 1e-9


def as_opinion_vector(values, n: int | None = None) -> np.ndarray:
    """Validate and return a 1-D float array of opinions.

    Raises ShapeMismatchError for non-1-D input, DimensionMismatchError
    when a node count is given and does not match, InvalidRangeError for
    non-finite entries.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ShapeMismatchError(f"opinion vector must be 1-D, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatchError(f"expected {n} opinions, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise InvalidRangeError("opinions must be finite")
    return v


@dataclass(frozen=True)
class Trajectory:
    """Ordered states of the synchronous iteration.

    steps[0] is the starting point; residual is the max-norm change of
    the final update.
    """

    steps: tuple[np.ndarray, ...]
    converged: bool
    iterations: int
    residual: float

    @property
    def final(self) -> np.ndarray:
        return self.steps[-1]


def fj_step(g: Graph, s, z) -> np.ndarray:
    """One synchronous averaging update; isolated nodes return s_i."""
    s = as_opinion_vector(s, g.n)
    z = as_opinion_vector(z, g.n)
    w = g.adjacency()
    return (s + w @ z) / (1.0 + g.degrees())


def fj_iterate(
    g: Graph,
    s,
    z0=None,
    tol: float = 1e-10,
    max_iter: int = 50_000,
) -> Trajectory:
    """Iterate fj_step until the max-norm change drops below tol.

    Non-convergence within max_iter is reported through the converged
    flag, not an exception.
    """
    if tol <= 0:
        raise InvalidRangeError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InvalidRangeError(f"max_iter must be at least 1, got {max_iter}")
    s = as_opinion_vector(s, g.n)
    z = s.copy() if z0 is None else as_opinion_vector(z0, g.n).copy()
    w = g.adjacency()
    scale = 1.0 + g.degrees()
    steps = [z.copy()]
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        z_next = (s + w @ z) / scale
        residual = float(np.max(np.abs(z_next - z)))
        steps.append(z_next)
        z = z_next
        if residual < tol:
            break
    return Trajectory(tuple(steps), residual < tol, iterations, residual)


def equilibrium(g: Graph, s) -> np.ndarray:
    """Solve (L + I) z = s directly.

    Dense Cholesky below DENSE_CUTOFF nodes, conjugate gradients on the
    matrix-free operator above.  The result is residual-checked to
    1e-9 * (1 + max|s|); failure raises SolverFailureError.
    """
    s = as_opinion_vector(s, g.n)
    if g.n < DENSE_CUTOFF:
        m = g.laplacian()
        m[np.diag_indices_from(m)] += 1.0
        z = cho_solve(cho_factor(m), s)
    else:
        z = solve_spd(lambda v: v + g.laplacian_matvec(v), s, tol=1e-12)
    residual = float(np.max(np.abs(z + g.laplacian_matvec(z) - s)))
    bound = _EQUILIBRIUM_RTOL * (1.0 + float(np.max(np.abs(s))))
    if residual > bound:
        raise SolverFailureError(f"equilibrium residual {residual:.3e} exceeds {bound:.3e}")
    return z


# --- CSV serialization -------------------------------------------------------


def write_opinions_csv(values) -> str:
    v = as_opinion_vector(values)
    lines = ["index,value"]
    # plain-float repr round-trips exactly and avoids numpy scalar noise
    lines.extend(f"{i},{float(x)!r}" for i, x in enumerate(v))
    return "\n".join(lines) + "\n"


def read_opinions_csv(text: str) -> np.ndarray:
    """Parse `index,value` rows (header optional) into an opinion vector.

    Indices must cover 0..n-1 exactly once, in any order.
    """
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.replace("\t", ",").split(",")]
        if lineno == 1 and fields[:2] == ["index", "value"]:
            continue
        if len(fields) != 2:
            raise MalformedLineError(f"line {lineno}: expected 'index,value', got {line!r}")
        try:
            idx = int(fields[0])
            val = float(fields[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: expected integer index and numeric value") from None
        if not np.isfinite(val):
            raise MalformedLineError(f"line {lineno}: value must be finite")
        if idx in entries:
            raise MalformedLineError(f"line {lineno}: duplicate index {idx}")
        if idx < 0:
            raise MalformedLineError(f"line {lineno}: negative index {idx}")
        entries[idx] = val
    if not entries:
        raise MalformedLineError("no opinion rows found")
    n = max(entries) + 1
    if len(entries) != n:
        missing = sorted(set(range(n)) - set(entries))[:3]
        raise MalformedLineError(f"missing indices {missing} in opinion file")
    return np.array([entries[i] for i in range(n)])


def write_trajectory_csv(traj: Trajectory) -> str:
    n = traj.steps[0].shape[0]
    lines = ["step," + ",".join(f"z{i}" for i in range(n))]
    for t, z in enumerate(traj.steps):
        lines.append(f"{t}," + ",".join(repr(float(x)) for x in z))
    return "\n".join(lines) + "\n"
