"""Figure rendering for the report paths.

Every renderer writes a PNG next to the delimited output and returns the
path.  matplotlib runs on the Agg backend so the CLI never needs a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _new_axes(title: str, xlabel: str, ylabel: str):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def smb_figure(trajectories, target: float | None, path: str) -> str:
    """One line per start: normalized information against depth."""
    fig, ax = _new_axes("Normalized information along tail classes", "depth n",
                        "information / class size (nats)")
    for traj in trajectories:
        ns = [row.n for row in traj.rows]
        vals = [row.info_norm for row in traj.rows]
        ax.plot(ns, vals, marker="o", markersize=3, linewidth=1, alpha=0.8)
    if target is not None:
        ax.axhline(target, color="black", linestyle="--", linewidth=1,
                   label=f"target {target:.6f}")
        ax.legend()
    return _finish(fig, path)


def sweep_figure(rows, target: float | None, path: str) -> str:
    fig, ax = _new_axes("Entropy of the refining partitions", "depth n",
                        "H / class size (nats)")
    ns = [row.n for row in rows]
    vals = [row.h_norm for row in rows]
    errs = [row.stderr if row.stderr is not None else 0.0 for row in rows]
    ax.errorbar(ns, vals, yerr=errs, marker="o", markersize=4, capsize=3)
    if target is not None:
        ax.axhline(target, color="black", linestyle="--", linewidth=1,
                   label=f"target {target:.6f}")
        ax.legend()
    return _finish(fig, path)


def covering_figure(stage_masses, rhs: float, path: str) -> str:
    """Cumulative selected mass by stage, with the required total marked."""
    fig, ax = _new_axes("Covering mass by stage", "stage i", "points covered")
    stages = list(range(1, len(stage_masses) + 1))
    running = []
    acc = 0
    for m in stage_masses:
        acc += m
        running.append(acc)
    ax.bar(stages, stage_masses, width=0.8, label="stage mass")
    ax.plot(stages, running, color="black", linewidth=1, label="cumulative")
    ax.axhline(rhs, color="black", linestyle="--", linewidth=1,
               label=f"(1-delta) * min term = {rhs:.6f}")
    ax.legend()
    return _finish(fig, path)


def folner_figure(rows, path: str) -> str:
    """rows: (n, defect, interior) triples."""
    fig, ax = _new_axes("Almost invariance along the chain", "level n", "fraction")
    ns = [r[0] for r in rows]
    ax.plot(ns, [float(r[1]) for r in rows], marker="o", label="boundary defect")
    ax.plot(ns, [float(r[2]) for r in rows], marker="s", label="interior fraction")
    ax.legend()
    return _finish(fig, path)


def spread_figure(report, path: str) -> str:
    fig, ax = _new_axes("Spread of class averages across starts", "depth n",
                        "max - min of averages")
    ns = [row.n for row in report.rows]
    ax.plot(ns, [row.spread for row in report.rows], marker="o")
    ax.set_yscale("symlog", linthresh=1e-6)
    return _finish(fig, path)


def subadditive_figure(report, path: str) -> str:
    fig, ax = _new_axes("Normalized values along the chain", "level n",
                        "F(class) / class size")
    ns = [row.n for row in report.rows]
    vals = [row.s_n for row in report.rows]
    errs = [row.stderr if row.stderr is not None else 0.0 for row in report.rows]
    ax.errorbar(ns, vals, yerr=errs, marker="o", capsize=3)
    ax.axhline(report.infimum, color="black", linestyle="--", linewidth=1,
               label=f"infimum {report.infimum:.6f}")
    ax.legend()
    return _finish(fig, path)
