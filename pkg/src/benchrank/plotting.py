"""SVG line charts for experiment reports (optional, needs matplotlib)."""

from __future__ import annotations

from pathlib import Path

from .experiments import ExperimentReport

_YLABEL = {
    "manipulation": "normalized Kendall error",
    "scaling": "normalized Kendall error",
    "subset": "Kendall tau to full-task ranking",
}


def plot_experiment(report: ExperimentReport, path) -> Path:
    """One line per method (and per phi for manipulation) against the last axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    x_axis = list(report.axes)[-1]
    outer = [k for k in report.axes if k != x_axis]
    with matplotlib.rc_context({"svg.hashsalt": "benchrank", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        groups = [{}] if not outer else [{outer[0]: v} for v in report.axes[outer[0]]]
        for fixed in groups:
            for m in report.method_labels:
                xs, ys = report.curve(m, x_axis, **fixed)
                label = m if not fixed else f"{m} ({', '.join(f'{k}={v}' for k, v in fixed.items())})"
                ax.plot(xs, ys, marker="o", markersize=3, label=label)
        ax.set_xlabel(x_axis.replace("_", " "))
        ax.set_ylabel(_YLABEL.get(report.experiment, "value"))
        if report.experiment == "scaling":
            ax.set_xscale("log")
        ax.legend(fontsize=6)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
