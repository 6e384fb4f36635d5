"""Render trajectories and constraint residuals to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from hamsys.dynamics import Trajectory

# residuals at machine zero still need a positive value on a log axis
_LOG_FLOOR = 1e-18


def plot_trajectory(trajectory: Trajectory, path: str) -> str:
    """Plot every state component against time and save to `path`."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for col, name in enumerate(trajectory.variables):
        ax.plot(trajectory.times, trajectory.states[:, col], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_residuals(trajectory: Trajectory, path: str) -> str:
    """Plot constraint residual magnitudes on a log scale and save to `path`."""
    fig, ax = plt.subplots(figsize=(8, 5))
    n_constraints = trajectory.residuals.shape[1]
    for col in range(n_constraints):
        values = [max(abs(v), _LOG_FLOOR) for v in trajectory.residuals[:, col]]
        ax.semilogy(trajectory.times, values, label=f"constraint {col + 1}")
    if n_constraints == 0:
        ax.text(0.5, 0.5, "no constraints", ha="center", transform=ax.transAxes)
    ax.set_xlabel("t")
    ax.set_ylabel("|residual|")
    if n_constraints:
        ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
