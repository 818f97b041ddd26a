"""Opinion dynamics on weighted graphs: averaging dynamics, the
polarization/disagreement metric family, and optimization procedures
over both network structure and internal opinions."""

from .control_network import (
    AdminConfig,
    AdminRound,
    AdminTrace,
    DesignResult,
    StructureBudget,
    admin_adjust,
    admin_loop,
    minimize_acr,
    minimize_pdi_over_laplacian,
)
from .control_opinion import (
    AttackPlan,
    BoundReport,
    ShiftProblem,
    ShiftResult,
    brute_force_attack,
    check_bounds,
    greedy_attack,
    heuristic_attack,
    minimize_pdi_shift,
)
from .dynamics import (
    Trajectory,
    equilibrium,
    fj_iterate,
    fj_step,
    read_opinions_csv,
    write_opinions_csv,
    write_trajectory_csv,
)
from .errors import PolarizeError
from .graph import (
    Graph,
    parse_edge_list,
    power_law_graph,
    random_graph,
    serialize_edge_list,
    two_community_graph,
)
from .metrics import (
    MetricEvaluator,
    MetricKind,
    MetricReport,
    MetricRoute,
    acr,
    disagreement,
    local_disagreement,
    mean_center,
    metric_gradient,
    metric_matrix,
    metrics_from_internal,
    polarization,
)
from .numkit import (
    ProjectedGradientConfig,
    dykstra_intersection,
    project_box,
    project_budget_simplex,
    project_frobenius_ball,
    project_l1_ball,
    projected_gradient_minimize,
    solve_spd,
)

__version__ = "0.1.0"

__all__ = [
    "AdminConfig",
    "AdminRound",
    "AdminTrace",
    "AttackPlan",
    "BoundReport",
    "DesignResult",
    "Graph",
    "MetricEvaluator",
    "MetricKind",
    "MetricReport",
    "MetricRoute",
    "PolarizeError",
    "ProjectedGradientConfig",
    "ShiftProblem",
    "ShiftResult",
    "StructureBudget",
    "Trajectory",
    "acr",
    "admin_adjust",
    "admin_loop",
    "brute_force_attack",
    "check_bounds",
    "disagreement",
    "dykstra_intersection",
    "equilibrium",
    "fj_iterate",
    "fj_step",
    "greedy_attack",
    "heuristic_attack",
    "local_disagreement",
    "mean_center",
    "metric_gradient",
    "metric_matrix",
    "metrics_from_internal",
    "minimize_acr",
    "minimize_pdi_over_laplacian",
    "minimize_pdi_shift",
    "parse_edge_list",
    "polarization",
    "power_law_graph",
    "project_box",
    "project_budget_simplex",
    "project_frobenius_ball",
    "project_l1_ball",
    "projected_gradient_minimize",
    "random_graph",
    "read_opinions_csv",
    "serialize_edge_list",
    "solve_spd",
    "two_community_graph",
    "write_opinions_csv",
    "write_trajectory_csv",
]
