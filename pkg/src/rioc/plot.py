"""
Static line charts for solutions and sweeps.

Figures are built on ``matplotlib.figure.Figure`` directly, so no pyplot state
is touched and charts can be produced from worker threads. ``write_svg`` saves
with a fixed id salt and no timestamp, so identical charts give identical files.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .model.grid import Trajectory

Series = Dict[str, Tuple[Sequence[float], Sequence[float]]]


def line_chart(series: Series, title: str = "", xlabel: str = "", ylabel: str = "",
               log_x: bool = False, figsize: Tuple[float, float] = (6.4, 4.0)) -> Figure:
    """
    One line per entry of ``series`` (name -> (x, y)).

    Non-finite points are dropped. With ``log_x`` the x values must be positive.
    """
    if not series:
        raise ValueError("line_chart needs at least one series")
    cleaned: List[Tuple[str, np.ndarray, np.ndarray]] = []
    for name, (x, y) in series.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError(f"series '{name}': x and y differ in shape {x.shape} vs {y.shape}")
        keep = np.isfinite(x) & np.isfinite(y)
        if log_x and np.any(x[keep] <= 0):
            raise ValueError(f"series '{name}': log axis needs positive x")
        cleaned.append((name, x[keep], y[keep]))
    if all(x.size == 0 for _, x, _ in cleaned):
        raise ValueError("line_chart: no finite points")

    fig = Figure(figsize=figsize)
    ax = fig.add_subplot(1, 1, 1)
    for name, x, y in cleaned:
        ax.plot(x, y, label=name, linewidth=1.5, marker="o" if log_x else None, markersize=3)
    if log_x:
        ax.set_xscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig


def solution_chart(q: Trajectory, z: Trajectory, xi: Optional[Trajectory] = None,
                   component: int = 0, title: str = "solution") -> Figure:
    """q, z and optionally xi of one component against t."""
    t = q.grid.nodes
    series: Series = {
        f"q_{component + 1}": (t, q.values[:, component]),
        f"z_{component + 1}": (t, z.values[:, component]),
    }
    if xi is not None:
        series[f"xi_{component + 1}"] = (t, xi.values[:, component])
    return line_chart(series, title=title, xlabel="t", ylabel="value")


def sweep_chart(rows: Sequence[Any], title: str = "vanishing viscosity") -> Figure:
    """Sweep metrics against epsilon on a log axis."""
    eps = [r.epsilon for r in rows]
    series: Series = {
        "|ell - ell_ref|_H1": (eps, [r.ell_distance_h1 for r in rows]),
        "|q - q_ref|_C0": (eps, [r.q_distance_c0 for r in rows]),
        "|xi|_inf": (eps, [r.xi_sup for r in rows]),
        "|lambda|_W1inf*": (eps, [r.lambda_dual_proxy for r in rows]),
    }
    fig = line_chart(series, title=title, xlabel="epsilon", ylabel="value", log_x=True)
    fig.axes[0].invert_xaxis()
    return fig


def write_svg(path: Union[str, Path], fig: Figure) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": "rioc"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
