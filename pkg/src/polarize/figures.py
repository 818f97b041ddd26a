"""Figure rendering for the report commands.

Every function writes a single PNG next to the delimited output it
mirrors.  Rendering is deterministic for fixed inputs (Agg backend,
fixed size and dpi, no timestamps), so figures participate in the
byte-reproducibility guarantee.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_DPI = 120


def save_attack_curves(path, curves: dict[str, tuple[list[int], list[float]]], kind: str) -> None:
    """Objective versus number of targets, one line per algorithm.

    curves maps algorithm name to a (target counts, values) pair.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name in sorted(curves):
        ks, values = curves[name]
        ax.plot(ks, values, marker="o", markersize=3.5, label=name)
    ax.set_xlabel("targets k")
    ax.set_ylabel(kind)
    ax.set_title(f"{kind} under extreme-setting attacks")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_admin_sweep(path, epsilons, final_p, final_d) -> None:
    """Final polarization and disagreement across the budget sweep."""
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.4))
    axes[0].plot(epsilons, final_p, marker="o", color="tab:red")
    axes[0].set_xlabel("epsilon")
    axes[0].set_ylabel("final polarization")
    axes[1].plot(epsilons, final_d, marker="o", color="tab:blue")
    axes[1].set_xlabel("epsilon")
    axes[1].set_ylabel("final disagreement")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.suptitle("administrator budget sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_admin_rounds(path, rounds, p_values, d_values, epsilon: float) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(rounds, p_values, marker="o", label="polarization", color="tab:red")
    ax.plot(rounds, d_values, marker="s", label="disagreement", color="tab:blue")
    ax.set_xlabel("round")
    ax.set_ylabel("metric value")
    ax.set_title(f"administrator rounds, epsilon={epsilon:g}")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_demo_comparison(path, report1: dict, report2: dict) -> None:
    """Side-by-side bars for the two wiring scenarios."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = ["polarization", "disagreement", "pdi"]
    x = range(len(labels))
    width = 0.38
    ax.bar([i - width / 2 for i in x], [report1[m] for m in labels], width, label="within-group wiring")
    ax.bar([i + width / 2 for i in x], [report2[m] for m in labels], width, label="cross-group wiring")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel("value")
    ax.set_title("same opinions, two wirings")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_objective_trace(path, trace, ylabel: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(range(len(trace)), trace, color="tab:green")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.set_title("optimizer objective trace")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_shift_scatter(path, s_hat, d) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.scatter(s_hat, d, s=14, color="tab:purple", alpha=0.8)
    ax.set_xlabel("internal opinion")
    ax.set_ylabel("applied reduction")
    ax.set_title("shift allocation by opinion")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
