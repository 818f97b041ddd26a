import numpy as np
import pytest

from polarize import Graph, equilibrium, fj_iterate, fj_step, random_graph
from polarize.dynamics import read_opinions_csv, write_opinions_csv, write_trajectory_csv
from polarize.errors import DimensionMismatchError, MalformedLineError


def test_fj_step_empty_graph_returns_internal():
    g = Graph(2, [])
    s = np.array([0.2, 0.9])
    assert np.array_equal(fj_step(g, s, np.array([0.7, 0.1])), s)


def test_fj_step_k2_hand_value(k2):
    # z' = ((0 + 1)/2, (1 + 0)/2)
    z1 = fj_step(k2, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert np.allclose(z1, [0.5, 0.5], atol=1e-15)


def test_fj_step_constant_fixed_point(triangle):
    c = 0.37 * np.ones(3)
    assert np.allclose(fj_step(triangle, c, c), c, atol=1e-15)


def test_fj_step_dimension_mismatch(k2):
    with pytest.raises(DimensionMismatchError):
        fj_step(k2, np.array([0.1, 0.2, 0.3]), np.array([0.1, 0.2]))


def test_fj_iterate_k2_reaches_thirds(k2):
    traj = fj_iterate(k2, np.array([0.0, 1.0]), tol=1e-10)
    assert traj.converged
    assert np.allclose(traj.final, [1 / 3, 2 / 3], atol=1e-8)
    assert traj.residual < 1e-10
    assert len(traj.steps) == traj.iterations + 1


def test_fj_iterate_constant_converges_immediately(triangle):
    traj = fj_iterate(triangle, 0.4 * np.ones(3))
    assert traj.converged and traj.iterations <= 2


def test_fj_iterate_limit_independent_of_start(k2):
    # the 2*tol window presumes per-step contraction <= 1/2, so use
    # lightly weighted instances where that holds
    cases = [
        (k2, np.array([0.0, 1.0])),
        (Graph(3, [(0, 1, 0.3), (1, 2, 0.3)]), np.array([0.1, 0.5, 0.8])),
    ]
    for g, s in cases:
        a = fj_iterate(g, s, z0=np.zeros(g.n), tol=1e-10)
        b = fj_iterate(g, s, z0=np.ones(g.n), tol=1e-10)
        assert np.max(np.abs(a.final - b.final)) <= 2e-10


def test_equilibrium_k2(k2):
    z = equilibrium(k2, np.array([0.0, 1.0]))
    assert np.allclose(z, [1 / 3, 2 / 3], atol=1e-12)


def test_equilibrium_constant_is_identity(triangle):
    c = 0.6 * np.ones(3)
    assert np.allclose(equilibrium(triangle, c), c, atol=1e-12)


def test_equilibrium_matches_iteration_on_small_graphs():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        g = random_graph(n, 0.6, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        s = rng.random(n)
        z = equilibrium(g, s)
        traj = fj_iterate(g, s, tol=1e-12)
        assert np.max(np.abs(z - traj.final)) <= 1e-7


def test_equilibrium_shift_equivariance():
    rng = np.random.default_rng(8)
    for _ in range(10):
        g = random_graph(12, 0.5, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        s = rng.random(12)
        c = float(rng.uniform(-5, 5))
        assert np.max(np.abs(equilibrium(g, s + c) - (equilibrium(g, s) + c))) <= 1e-10


def test_equilibrium_linearity():
    rng = np.random.default_rng(9)
    for _ in range(10):
        g = random_graph(10, 0.5, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        s1, s2 = rng.random(10), rng.random(10)
        a, b = float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))
        lhs = equilibrium(g, a * s1 + b * s2)
        rhs = a * equilibrium(g, s1) + b * equilibrium(g, s2)
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_equilibrium_preserves_unit_interval():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n = int(rng.integers(2, 50))
        g = random_graph(n, 0.4, 0.5, 1.5, seed=int(rng.integers(1 << 30)))
        z = equilibrium(g, rng.random(n))
        assert z.min() >= -1e-12 and z.max() <= 1 + 1e-12


def test_equilibrium_uses_iterative_path_above_cutoff():
    # n past the dense cutoff exercises the conjugate-gradient branch
    g = random_graph(520, 0.01, 0.5, 1.5, seed=77)
    rng = np.random.default_rng(78)
    s = rng.random(520)
    z = equilibrium(g, s)
    resid = z + g.laplacian_matvec(z) - s
    assert float(np.max(np.abs(resid))) <= 1e-9 * (1 + float(np.max(np.abs(s))))


def test_opinions_csv_round_trip():
    values = np.array([0.25, 1 / 3, 0.0, 0.875])
    assert np.array_equal(read_opinions_csv(write_opinions_csv(values)), values)


def test_opinions_csv_accepts_unordered_rows_without_header():
    assert np.array_equal(read_opinions_csv("1,0.5\n0,0.25\n"), np.array([0.25, 0.5]))


def test_opinions_csv_rejects_gaps_and_duplicates():
    with pytest.raises(MalformedLineError):
        read_opinions_csv("index,value\n0,0.1\n2,0.3\n")
    with pytest.raises(MalformedLineError):
        read_opinions_csv("0,0.1\n0,0.2\n")
    with pytest.raises(MalformedLineError):
        read_opinions_csv("\n")


def test_trajectory_csv_shape(k2):
    traj = fj_iterate(k2, np.array([0.0, 1.0]), tol=1e-10)
    lines = write_trajectory_csv(traj).splitlines()
    assert lines[0] == "step,z0,z1"
    assert len(lines) == len(traj.steps) + 1
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[1]) == 0.0 and float(first[2]) == 1.0
