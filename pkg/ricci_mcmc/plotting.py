# ricci_mcmc/plotting.py

"""
Self-contained SVG line plot of the averaged L1 distance, rendered from a
jinja2 template (templates/convergence.svg.j2). One polyline per generator.
"""

from __future__ import annotations
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple, Union

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from .errors import DomainError, IoError

if TYPE_CHECKING:
    from .experiments import ExperimentResult

TEMPLATE_DIR = Path(__file__).parent / "templates"
TEMPLATE_NAME = "convergence.svg.j2"

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 20, "top": 20, "bottom": 50}
LOG_FLOOR = 1e-16
COLORS = {"optimal": "#d62728", "mh": "#1f77b4"}
LABELS = {"optimal": "optimal Q", "mh": "Q MH"}

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    autoescape=select_autoescape(["svg", "xml", "j2"]),
    trim_blocks=True,
    lstrip_blocks=True,
)


def _y_range(values: Sequence[np.ndarray], log_y: bool) -> Tuple[float, float]:
    stacked = np.concatenate([np.asarray(v, dtype=np.float64) for v in values])
    if log_y:
        lo, hi = float(np.min(stacked)), float(np.max(stacked))
        if hi - lo < 1e-12:
            lo, hi = lo - 1.0, hi + 1.0
        return lo, hi
    hi = float(np.max(stacked))
    # linear axes start at zero; a flat zero series gets a unit range
    return 0.0, hi if hi > 0 else 1.0


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def write_convergence_plot(res: "ExperimentResult", path: Union[str, Path], log_y: bool = False) -> None:
    """
    Plot mean L1 against time for every generator in res.

    Raises:
        DomainError: if res has no l1 series
        IoError: if the file cannot be written
    """
    path = Path(path)
    gens = [g for g in res.config.generators if "l1" in res.mean_series.get(g, {})]
    if not gens:
        raise DomainError("result carries no l1 series to plot")

    series: Dict[str, np.ndarray] = {}
    for g in gens:
        y = np.asarray(res.mean_series[g]["l1"], dtype=np.float64)
        series[g] = np.log10(np.maximum(y, LOG_FLOOR)) if log_y else y

    t = np.asarray(res.times, dtype=np.float64)
    t_lo, t_hi = float(t[0]), float(t[-1])
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0
    y_lo, y_hi = _y_range(list(series.values()), log_y)

    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v: float) -> float:
        return MARGIN["left"] + plot_w * (v - t_lo) / (t_hi - t_lo)

    def sy(v: float) -> float:
        return MARGIN["top"] + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    lines = []
    for g in gens:
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, series[g]))
        lines.append({"name": LABELS.get(g, g), "color": COLORS.get(g, "#333333"), "points": pts})

    y_ticks = []
    for v in _ticks(y_lo, y_hi):
        label = f"1e{v:.1f}" if log_y else f"{v:.3g}"
        y_ticks.append({"y": f"{sy(v):.2f}", "label": label})
    x_ticks = [{"x": f"{sx(v):.2f}", "label": f"{v:.3g}"} for v in _ticks(t_lo, t_hi)]

    svg = _env.get_template(TEMPLATE_NAME).render(
        width=WIDTH,
        height=HEIGHT,
        left=MARGIN["left"],
        right=WIDTH - MARGIN["right"],
        top=MARGIN["top"],
        bottom=HEIGHT - MARGIN["bottom"],
        lines=lines,
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        x_label="time",
        y_label="L1 distance" + (" (log10)" if log_y else ""),
    )
    if not path.parent.exists():
        raise IoError(path, f"directory {path.parent} does not exist")
    try:
        path.write_text(svg, encoding="utf-8")
    except OSError as e:
        raise IoError(path, str(e)) from e
