"""Command-line surface.

Subcommands: simulate, metrics, demo-echo, admin, attack, and optimize
(with pdi-laplacian, acr, shift).  Every command writes its outputs
plus a run manifest into --out; report commands also render figures
next to the delimited files unless --no-figures is given.  Outputs are
byte-reproducible for fixed inputs and seed.

Exit codes: 0 success, 2 parse problem, 3 dimension or feasibility
problem, 4 solver failure, 5 violated internal guarantee.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, figures
from .control_network import AdminConfig, admin_loop, minimize_acr, minimize_pdi_over_laplacian
from .control_opinion import (
    brute_force_attack,
    check_bounds,
    greedy_attack,
    heuristic_attack,
    minimize_pdi_shift,
)
from .dynamics import (
    equilibrium,
    fj_iterate,
    read_opinions_csv,
    write_opinions_csv,
    write_trajectory_csv,
)
from .errors import InternalCheckError, MalformedLineError, PolarizeError
from .graph import Graph, parse_edge_list, serialize_edge_list
from .metrics import acr as acr_trace
from .metrics import metrics_from_internal

SCHEMA_VERSION = 1

# fixed demonstration instance: six nodes, two opinion groups, and two
# ways of wiring four unit edges between them
_DEMO_OPINIONS = (0.0, 0.0, 0.0, 1.0, 1.0, 1.0)
_DEMO_WITHIN = ((0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0))
_DEMO_ACROSS = ((0, 3, 1.0), (1, 4, 1.0), (2, 5, 1.0), (0, 4, 1.0))

_ATTACK_ALGORITHMS = ("greedy", "brute-force", "mean-opinion", "max-connection", "max-degree")


# --- input/output plumbing ---------------------------------------------------


def _load_graph(path: str) -> Graph:
    return parse_edge_list(Path(path).read_text())


def _load_opinions(path: str, n: int | None = None) -> np.ndarray:
    values = read_opinions_csv(Path(path).read_text())
    if n is not None and values.shape[0] != n:
        from .errors import DimensionMismatchError

        raise DimensionMismatchError(f"opinion file has {values.shape[0]} entries, graph has {n} nodes")
    return values


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("POLARIZE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise MalformedLineError(f"POLARIZE_SEED must be an integer, got {env!r}") from None


class RunWriter:
    """Collects a command's output files and writes the manifest last."""

    def __init__(self, out_dir: str, command: str, inputs: dict, seed: int, parameters: dict):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.inputs = inputs
        self.seed = seed
        self.parameters = parameters
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        return self.dir / name

    def write_text(self, name: str, text: str) -> None:
        self.path(name).write_text(text)
        self.files.append(name)

    def write_json(self, name: str, obj) -> None:
        self.write_text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def add_figure(self, name: str) -> Path:
        self.files.append(name)
        return self.path(name)

    def finish(self) -> None:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "parameters": self.parameters,
            "tool_version": __version__,
            "outputs": sorted(self.files),
        }
        self.path("manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --- commands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    s = _load_opinions(args.opinions, g.n)
    run = RunWriter(
        args.out,
        "simulate",
        {"graph": args.graph, "opinions": args.opinions},
        _resolve_seed(args),
        {"tol": args.tol, "max_iter": args.max_iter, "trajectory": bool(args.trajectory)},
    )
    z = equilibrium(g, s)
    run.write_text("equilibrium.csv", write_opinions_csv(z))
    if args.trajectory:
        traj = fj_iterate(g, s, tol=args.tol, max_iter=args.max_iter)
        run.write_text("trajectory.csv", write_trajectory_csv(traj))
        print(f"trajectory: converged={traj.converged} iterations={traj.iterations} residual={traj.residual:.3e}")
    run.finish()
    print(f"wrote {run.path('equilibrium.csv')}")
    return 0


def cmd_metrics(args) -> int:
    g = _load_graph(args.graph)
    s = _load_opinions(args.opinions, g.n)
    run = RunWriter(
        args.out,
        "metrics",
        {"graph": args.graph, "opinions": args.opinions},
        _resolve_seed(args),
        {"mu": args.mu, "route": args.route},
    )
    report = metrics_from_internal(g, s, mu=args.mu, route=args.route)
    doc = {"schema_version": SCHEMA_VERSION, **report.to_dict()}
    run.write_json("metrics.json", doc)
    run.finish()
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_demo_echo(args) -> int:
    run = RunWriter(args.out, "demo-echo", {}, _resolve_seed(args), {})
    s = np.array(_DEMO_OPINIONS)
    g1 = Graph(len(s), _DEMO_WITHIN)
    g2 = Graph(len(s), _DEMO_ACROSS)
    r1 = metrics_from_internal(g1, s)
    r2 = metrics_from_internal(g2, s)
    if not (r1.polarization > r2.polarization and r1.disagreement < r2.disagreement):
        raise InternalCheckError("within-group wiring must give higher polarization and lower disagreement")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario1": r1.to_dict(),
        "scenario2": r2.to_dict(),
        "polarization_higher_in_scenario1": True,
        "disagreement_lower_in_scenario1": True,
    }
    run.write_json("demo_echo.json", doc)
    run.write_text("scenario1_graph.txt", serialize_edge_list(g1))
    run.write_text("scenario2_graph.txt", serialize_edge_list(g2))
    run.write_text("opinions.csv", write_opinions_csv(s))
    if not args.no_figures:
        figures.save_demo_comparison(run.add_figure("demo_metrics.png"), r1.to_dict(), r2.to_dict())
    run.finish()
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _parse_epsilons(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise MalformedLineError(f"--epsilon expects a comma-separated list of reals, got {text!r}") from None
    if not values:
        raise MalformedLineError("--epsilon list is empty")
    return values


def cmd_admin(args) -> int:
    g = _load_graph(args.graph)
    s = _load_opinions(args.opinions, g.n)
    epsilons = _parse_epsilons(args.epsilon)
    run = RunWriter(
        args.out,
        "admin",
        {"graph": args.graph, "opinions": args.opinions},
        _resolve_seed(args),
        {"epsilon": epsilons, "rounds": args.rounds, "jobs": args.jobs},
    )

    def solve(eps: float):
        return admin_loop(g, s, AdminConfig(epsilon=eps, rounds=args.rounds))

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            traces = list(pool.map(solve, epsilons))
    else:
        traces = [solve(eps) for eps in epsilons]

    jsonl_lines = []
    csv_lines = ["round,epsilon,polarization,disagreement"]
    for eps, trace in zip(epsilons, traces):
        for rec in trace.rounds:
            jsonl_lines.append(
                json.dumps(
                    {
                        "schema_version": SCHEMA_VERSION,
                        "epsilon": eps,
                        "round": rec.round,
                        "polarization": rec.polarization,
                        "disagreement": rec.disagreement,
                    },
                    sort_keys=True,
                )
            )
            csv_lines.append(f"{rec.round},{eps!r},{rec.polarization!r},{rec.disagreement!r}")
    run.write_text("admin_rounds.jsonl", "\n".join(jsonl_lines) + "\n")
    run.write_text("admin_sweep.csv", "\n".join(csv_lines) + "\n")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "epsilons": epsilons,
        "final_polarization": [t.final_polarization for t in traces],
        "final_disagreement": [t.final_disagreement for t in traces],
        "rounds_used": [len(t.rounds) for t in traces],
    }
    run.write_json("admin_summary.json", summary)
    for i, trace in enumerate(traces):
        run.write_text(f"admin_final_{i}.txt", serialize_edge_list(trace.final_graph))
    if not args.no_figures:
        if len(epsilons) > 1:
            figures.save_admin_sweep(
                run.add_figure("admin_sweep.png"),
                epsilons,
                summary["final_polarization"],
                summary["final_disagreement"],
            )
        else:
            trace = traces[0]
            figures.save_admin_rounds(
                run.add_figure("admin_rounds.png"),
                [rec.round for rec in trace.rounds],
                [rec.polarization for rec in trace.rounds],
                [rec.disagreement for rec in trace.rounds],
                epsilons[0],
            )
    run.finish()
    for eps, trace in zip(epsilons, traces):
        print(
            f"epsilon={eps:g}: rounds={len(trace.rounds)} "
            f"final_polarization={trace.final_polarization:.6g} final_disagreement={trace.final_disagreement:.6g}"
        )
    return 0


def _run_attack(algorithm: str, g: Graph, s: np.ndarray, k: int, kind: str):
    if algorithm == "greedy":
        return greedy_attack(g, s, k, kind)
    if algorithm == "brute-force":
        return brute_force_attack(g, s, k, kind)
    rule = algorithm.replace("-", "_")
    return heuristic_attack(g, s, k, kind, rule)


def cmd_attack(args) -> int:
    g = _load_graph(args.graph)
    s = _load_opinions(args.opinions, g.n)
    algorithms = list(_ATTACK_ALGORITHMS if args.algorithm == "all" else (args.algorithm,))
    if args.algorithm == "all":
        # exhaustive search is kept out of "all": its enumeration guard
        # rejects all but small instances
        algorithms.remove("brute-force")
    run = RunWriter(
        args.out,
        "attack",
        {"graph": args.graph, "opinions": args.opinions},
        _resolve_seed(args),
        {"k": args.k, "objective": args.objective, "algorithm": args.algorithm, "jobs": args.jobs},
    )

    def solve(name: str):
        plan = _run_attack(name, g, s, args.k, args.objective)
        return plan, check_bounds(plan, g, s)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(solve, algorithms))
    else:
        results = [solve(name) for name in algorithms]

    csv_lines = ["algorithm,k,objective"]
    curves: dict[str, tuple[list[int], list[float]]] = {}
    for name, (plan, bounds) in zip(algorithms, results):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "algorithm": name,
            **plan.to_dict(),
            "bounds": bounds.to_dict(),
        }
        run.write_json(f"attack_{name.replace('-', '_')}.json", doc)
        if name == "brute-force":
            ks = [0, len(plan.omega)]
            values = [plan.baseline, plan.objective]
        else:
            ks = list(range(len(plan.objective_trace) + 1))
            values = [plan.baseline, *plan.objective_trace]
        curves[name] = (ks, values)
        for kk, val in zip(ks, values):
            csv_lines.append(f"{name},{kk},{val!r}")
    run.write_text("attack_curve.csv", "\n".join(csv_lines) + "\n")
    if not args.no_figures:
        figures.save_attack_curves(run.add_figure("attack_curve.png"), curves, args.objective)
    run.finish()
    for name, (plan, _) in zip(algorithms, results):
        print(f"{name}: objective={plan.objective:.6g} omega={list(plan.omega)} values={list(plan.values)}")
    return 0


def cmd_optimize_pdi_laplacian(args) -> int:
    s = _load_opinions(args.opinions)
    run = RunWriter(
        args.out,
        "optimize pdi-laplacian",
        {"opinions": args.opinions},
        _resolve_seed(args),
        {"trace_budget": args.trace_budget},
    )
    result = minimize_pdi_over_laplacian(s, args.trace_budget)
    run.write_text("optimized_graph.txt", serialize_edge_list(result.graph))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "problem": "pdi-laplacian",
        "objective": result.objective,
        "baseline": None,
        "iterations": len(result.objective_trace),
        "edge_density": result.edge_density,
        "budget": {"m": args.trace_budget},
    }
    run.write_json("report.json", doc)
    if not args.no_figures:
        figures.save_objective_trace(run.add_figure("objective_trace.png"), result.objective_trace, "pdi")
    run.finish()
    print(f"objective={result.objective:.6g} edge_density={result.edge_density:.3f}")
    return 0


def cmd_optimize_acr(args) -> int:
    g = _load_graph(args.graph)
    run = RunWriter(
        args.out,
        "optimize acr",
        {"graph": args.graph},
        _resolve_seed(args),
        {"kind": args.kind, "change_budget": args.change_budget},
    )
    baseline = acr_trace(g, args.kind)
    result = minimize_acr(g, args.kind, args.change_budget)
    run.write_text("optimized_graph.txt", serialize_edge_list(result.graph))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "problem": "acr",
        "kind": args.kind,
        "objective": result.objective,
        "baseline": baseline,
        "iterations": len(result.objective_trace),
        "edge_density": result.edge_density,
        "budget": {"k": args.change_budget},
    }
    run.write_json("report.json", doc)
    if not args.no_figures:
        figures.save_objective_trace(run.add_figure("objective_trace.png"), result.objective_trace, f"acr ({args.kind})")
    run.finish()
    print(f"objective={result.objective:.6g} baseline={baseline:.6g}")
    return 0


def cmd_optimize_shift(args) -> int:
    g = _load_graph(args.graph)
    s = _load_opinions(args.opinions, g.n)
    run = RunWriter(
        args.out,
        "optimize shift",
        {"graph": args.graph, "opinions": args.opinions},
        _resolve_seed(args),
        {"alpha": args.alpha},
    )
    d, s_new, report = minimize_pdi_shift(g, s, args.alpha)
    correlation = None
    if np.std(s) > 0 and np.std(d) > 0:
        correlation = float(np.corrcoef(s, d)[0, 1])
    run.write_text("shift_reduction.csv", write_opinions_csv(d))
    run.write_text("shift_opinions.csv", write_opinions_csv(s_new))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "problem": "shift",
        "objective": report.pdi,
        "baseline": metrics_from_internal(g, s).pdi,
        "budget": {"alpha": args.alpha},
        "budget_used": float(np.sum(d)),
        "metrics": report.to_dict(),
        "opinion_reduction_correlation": correlation,
    }
    run.write_json("report.json", doc)
    if not args.no_figures:
        figures.save_shift_scatter(run.add_figure("shift_scatter.png"), s, d)
    run.finish()
    print(f"objective={report.pdi:.6g} budget_used={float(np.sum(d)):.6g}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarize",
        description="Opinion dynamics, polarization/disagreement metrics, and network/opinion interventions.",
    )
    parser.add_argument("--version", action="version", version=f"polarize {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="polarize-out", help="output directory (default: polarize-out)")
    common.add_argument("--seed", type=int, default=None, help="run seed; falls back to POLARIZE_SEED, then 0")

    figure_opt = argparse.ArgumentParser(add_help=False)
    figure_opt.add_argument("--no-figures", action="store_true", help="skip PNG rendering next to the data files")

    p = sub.add_parser("simulate", parents=[common], help="solve for equilibrium opinions")
    p.add_argument("graph")
    p.add_argument("opinions")
    p.add_argument("--tol", type=float, default=1e-10, help="iteration stop threshold (with --trajectory)")
    p.add_argument("--max-iter", type=int, default=50_000)
    p.add_argument("--trajectory", action="store_true", help="also record the per-step iteration")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", parents=[common], help="polarization/disagreement report")
    p.add_argument("graph")
    p.add_argument("opinions")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--route", choices=["from_z", "from_sbar", "from_s"], default="from_z")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("demo-echo", parents=[common, figure_opt], help="two-wiring demonstration")
    p.set_defaults(func=cmd_demo_echo)

    p = sub.add_parser("admin", parents=[common, figure_opt], help="administrator re-weighting loop")
    p.add_argument("graph")
    p.add_argument("opinions")
    p.add_argument("--epsilon", required=True, help="budget, or comma-separated sweep list")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    p.set_defaults(func=cmd_admin)

    p = sub.add_parser("attack", parents=[common, figure_opt], help="extreme-setting adversary")
    p.add_argument("graph")
    p.add_argument("opinions")
    p.add_argument("--k", type=int, required=True, help="number of targets")
    p.add_argument("--objective", choices=["polarization", "disagreement"], default="polarization")
    p.add_argument(
        "--algorithm",
        choices=[*_ATTACK_ALGORITHMS, "all"],
        default="all",
        help="'all' runs greedy plus the heuristics (exhaustive search only when asked for)",
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel algorithm workers")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("optimize", help="structure and opinion optimizers")
    opt_sub = p.add_subparsers(dest="problem", required=True)

    q = opt_sub.add_parser("pdi-laplacian", parents=[common, figure_opt], help="best graph at fixed Laplacian trace")
    q.add_argument("opinions")
    q.add_argument("--trace-budget", type=float, required=True, help="total Laplacian trace m")
    q.set_defaults(func=cmd_optimize_pdi_laplacian)

    q = opt_sub.add_parser("acr", parents=[common, figure_opt], help="minimize average-case conflict risk")
    q.add_argument("graph")
    q.add_argument("--kind", choices=["pdi", "polarization", "disagreement"], default="pdi")
    q.add_argument("--change-budget", type=float, required=True, help="entrywise 1-norm budget k")
    q.set_defaults(func=cmd_optimize_acr)

    q = opt_sub.add_parser("shift", parents=[common, figure_opt], help="budgeted opinion reduction")
    q.add_argument("graph")
    q.add_argument("opinions")
    q.add_argument("--alpha", type=float, required=True, help="total reduction budget")
    q.set_defaults(func=cmd_optimize_shift)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolarizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
