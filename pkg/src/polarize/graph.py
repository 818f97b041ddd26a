"""Weighted undirected graphs and their edge-list text format.

A graph is a node count plus a set of weighted edges on nodes 0..n-1.
No self-loops, no duplicate pairs, weights positive and finite.  The
text format is a header line ``n=<count>`` followed by one
``i<sep>j<sep>w`` line per edge, where the separator is a comma or a
tab; blank lines and lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DuplicateEdgeError,
    IndexOutOfRangeError,
    InvalidProbabilityError,
    InvalidRangeError,
    MalformedLineError,
    NegativeWeightError,
    SelfLoopError,
)

_HEADER_RE = re.compile(r"^n\s*=\s*(\d+)$")
_SEP_RE = re.compile(r"[,\t]")


@dataclass(frozen=True)
class Graph:
    """Immutable weighted undirected graph.

    Edges are stored as (i, j, w) with i < j, sorted by pair, so two
    graphs built from the same edge set compare equal and serialize
    identically regardless of input order.  Zero-weight edges are
    dropped at construction; they are indistinguishable from absent
    edges in every quantity this package computes.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidRangeError(f"node count must be positive, got {self.n}")
        canonical = []
        seen: set[tuple[int, int]] = set()
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise SelfLoopError(f"self-loop at node {i}")
            if i > j:
                i, j = j, i
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise IndexOutOfRangeError(f"edge ({i},{j}) outside 0..{self.n - 1}")
            if not np.isfinite(w):
                raise MalformedLineError(f"non-finite weight on edge ({i},{j})")
            if w < 0:
                raise NegativeWeightError(f"negative weight {w} on edge ({i},{j})")
            if (i, j) in seen:
                raise DuplicateEdgeError(f"edge ({i},{j}) listed twice")
            seen.add((i, j))
            if w > 0:
                canonical.append((i, j, w))
        canonical.sort()
        object.__setattr__(self, "edges", tuple(canonical))

    # --- matrix views --------------------------------------------------------

    @cached_property
    def _edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.edges:
            empty = np.empty(0, dtype=int)
            return empty, empty, np.empty(0, dtype=float)
        ii, jj, ww = zip(*self.edges)
        return np.array(ii, dtype=int), np.array(jj, dtype=int), np.array(ww, dtype=float)

    @cached_property
    def _pair_weight(self) -> dict[tuple[int, int], float]:
        return {(i, j): w for i, j, w in self.edges}

    def adjacency(self) -> np.ndarray:
        """Dense symmetric weight matrix W."""
        ii, jj, ww = self._edge_arrays
        w = np.zeros((self.n, self.n))
        w[ii, jj] = ww
        w[jj, ii] = ww
        return w

    def degrees(self) -> np.ndarray:
        """Weighted degrees d_i = sum_j W_ij."""
        ii, jj, ww = self._edge_arrays
        d = np.zeros(self.n)
        np.add.at(d, ii, ww)
        np.add.at(d, jj, ww)
        return d

    def neighbor_counts(self) -> np.ndarray:
        """Number of incident edges per node (unweighted)."""
        ii, jj, _ = self._edge_arrays
        c = np.zeros(self.n, dtype=int)
        np.add.at(c, ii, 1)
        np.add.at(c, jj, 1)
        return c

    def laplacian(self) -> np.ndarray:
        """Dense graph Laplacian L = diag(d) - W."""
        w = self.adjacency()
        return np.diag(self.degrees()) - w

    def laplacian_matvec(self, x: np.ndarray) -> np.ndarray:
        """L @ x without materializing the dense matrix."""
        ii, jj, ww = self._edge_arrays
        x = np.asarray(x, dtype=float)
        out = self.degrees() * x
        np.add.at(out, ii, -ww * x[jj])
        np.add.at(out, jj, -ww * x[ii])
        return out

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints and weights as parallel arrays (i, j, w), i < j."""
        return self._edge_arrays

    def edge_weight(self, i: int, j: int) -> float | None:
        """Weight of the undirected pair {i, j}, or None if absent."""
        if i > j:
            i, j = j, i
        return self._pair_weight.get((i, j))

    def edge_count(self) -> int:
        return len(self.edges)


# --- text format -------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format into a Graph.

    Raises MalformedLineError, NegativeWeightError, SelfLoopError,
    DuplicateEdgeError, or IndexOutOfRangeError, each naming the
    offending line.
    """
    n: int | None = None
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            m = _HEADER_RE.match(line)
            if m is None:
                raise MalformedLineError(f"line {lineno}: expected header 'n=<count>', got {line!r}")
            n = int(m.group(1))
            if n < 1:
                raise MalformedLineError(f"line {lineno}: node count must be positive")
            continue
        fields = [f.strip() for f in _SEP_RE.split(line)]
        if len(fields) != 3:
            raise MalformedLineError(f"line {lineno}: expected 'i,j,w', got {line!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: node indices must be integers") from None
        try:
            w = float(fields[2])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: weight must be a number") from None
        if not np.isfinite(w):
            raise MalformedLineError(f"line {lineno}: weight must be finite")
        if w < 0:
            raise NegativeWeightError(f"line {lineno}: negative weight {w}")
        if i == j:
            raise SelfLoopError(f"line {lineno}: self-loop at node {i}")
        a, b = (i, j) if i < j else (j, i)
        if not (0 <= a and b < n):
            raise IndexOutOfRangeError(f"line {lineno}: edge ({i},{j}) outside 0..{n - 1}")
        if (a, b) in seen:
            raise DuplicateEdgeError(f"line {lineno}: edge ({i},{j}) listed twice")
        seen.add((a, b))
        edges.append((a, b, w))
    if n is None:
        raise MalformedLineError("missing header 'n=<count>'")
    return Graph(n, tuple(edges))


def serialize_edge_list(g: Graph) -> str:
    """Inverse of parse_edge_list; weights printed in shortest round-trip form."""
    lines = [f"n={g.n}"]
    lines.extend(f"{i},{j},{w!r}" for i, j, w in g.edges)
    return "\n".join(lines) + "\n"


# --- generators --------------------------------------------------------------


def _check_weight_range(weight_lo: float, weight_hi: float) -> None:
    if not (0 <= weight_lo <= weight_hi) or not np.isfinite(weight_hi):
        raise InvalidRangeError(f"weight range [{weight_lo}, {weight_hi}] must satisfy 0 <= lo <= hi")


def random_graph(n: int, p: float, weight_lo: float, weight_hi: float, seed: int) -> Graph:
    """Erdos-Renyi graph with i.i.d. uniform weights, deterministic per seed."""
    if n < 1:
        raise InvalidRangeError(f"node count must be positive, got {n}")
    if not (0 <= p <= 1):
        raise InvalidProbabilityError(f"edge probability {p} outside [0, 1]")
    _check_weight_range(weight_lo, weight_hi)
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, float(rng.uniform(weight_lo, weight_hi))))
    return Graph(n, tuple(edges))


def two_community_graph(
    n: int,
    p_in: float,
    p_out: float,
    weight_lo: float,
    weight_hi: float,
    seed: int,
) -> Graph:
    """Planted two-block graph: nodes below n//2 form one community.

    Pairs inside a community appear with probability p_in, pairs across
    with p_out.
    """
    if n < 2:
        raise InvalidRangeError(f"need at least 2 nodes, got {n}")
    for p in (p_in, p_out):
        if not (0 <= p <= 1):
            raise InvalidProbabilityError(f"edge probability {p} outside [0, 1]")
    _check_weight_range(weight_lo, weight_hi)
    rng = np.random.default_rng(seed)
    half = n // 2
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if (i < half) == (j < half) else p_out
            if rng.random() < p:
                edges.append((i, j, float(rng.uniform(weight_lo, weight_hi))))
    return Graph(n, tuple(edges))


def power_law_graph(n: int, attach: int, weight_lo: float, weight_hi: float, seed: int) -> Graph:
    """Preferential-attachment graph with a heavy-tailed degree profile.

    Each new node attaches to `attach` distinct existing nodes drawn
    proportionally to current degree.
    """
    if not (1 <= attach < n):
        raise InvalidRangeError(f"need 1 <= attach < n, got attach={attach}, n={n}")
    _check_weight_range(weight_lo, weight_hi)
    rng = np.random.default_rng(seed)
    targets = list(range(attach))
    repeated: list[int] = []
    edges = []
    for source in range(attach, n):
        for t in targets:
            a, b = (t, source) if t < source else (source, t)
            edges.append((a, b, float(rng.uniform(weight_lo, weight_hi))))
        repeated.extend(targets)
        repeated.extend([source] * attach)
        chosen: list[int] = []
        taken: set[int] = set()
        while len(chosen) < attach:
            x = repeated[int(rng.integers(0, len(repeated)))]
            if x not in taken:
                taken.add(x)
                chosen.append(x)
        targets = chosen
    return Graph(n, tuple(edges))
