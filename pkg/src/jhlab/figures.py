"""Report figures rendered straight to files.

Uses the Agg canvas directly (no pyplot, no GUI, no global state) so
rendering is deterministic and safe in headless runs.  Figures are
written atomically next to the delimited outputs they illustrate.
"""

import math
import os
import tempfile

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .counterexample import DivergenceReport
from .errors import InputError
from .extremal import GrowthRecord, fit_growth_slope

_PNG_METADATA = {"Software": "jhlab"}


def _save(figure: Figure, path: str) -> None:
    FigureCanvasAgg(figure)
    directory = os.path.dirname(os.path.abspath(path))
    handle = tempfile.NamedTemporaryFile("wb", dir=directory, delete=False,
                                         prefix=".tmp-", suffix=".png")
    try:
        with handle as fh:
            figure.savefig(fh, format="png", dpi=150, metadata=_PNG_METADATA)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def render_growth_figure(records: list[GrowthRecord], path: str,
                         title: str = "Growth of the transformed norm") -> None:
    """Plot sigma(E(M_n)) against n (log axis), one series per exactness."""
    if not records:
        raise InputError("no growth records to plot")
    figure = Figure(figsize=(6.4, 4.2))
    ax = figure.subplots()
    styles = {"exact": ("o-", "tab:blue"),
              "heuristic-lower-bound": ("s--", "tab:orange")}
    for exactness, (style, color) in styles.items():
        xs = [r.n for r in records if r.exactness == exactness]
        ys = [float(r.sigma_em) for r in records if r.exactness == exactness]
        if xs:
            ax.plot(xs, ys, style, color=color, label=exactness)
    fitted = [r for r in records if r.exactness == "exact" and r.n > 1]
    if len(fitted) < 2:
        fitted = [r for r in records
                  if r.exactness == "heuristic-lower-bound" and r.n > 1]
    if len(fitted) >= 2:
        slope, intercept = fit_growth_slope(fitted)
        xs = sorted(r.n for r in fitted)
        ax.plot(xs, [slope * math.log(n) + intercept for n in xs], ":",
                color="tab:gray", label=f"fit {slope:.3f} ln n + {intercept:.3f}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("sigma(E(M_n))")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    figure.tight_layout()
    _save(figure, path)


def render_divergence_figure(report: DivergenceReport, path: str,
                             title: str = "Certified lower bounds per block") -> None:
    """Plot L_r per block with the running max and the hypothesized K."""
    if not report.rows:
        raise InputError("no report rows to plot")
    figure = Figure(figsize=(6.4, 4.2))
    ax = figure.subplots()
    rs = [row.r for row in report.rows]
    ax.step(rs, [float(row.running_max) for row in report.rows],
            where="post", color="tab:gray", alpha=0.6, label="running max")
    for flagged, color, label in ((False, "tab:blue", "L_r"),
                                  (True, "tab:red", "L_r > K")):
        xs = [row.r for row in report.rows if row.flagged == flagged]
        ys = [float(row.lower_bound) for row in report.rows if row.flagged == flagged]
        if xs:
            ax.plot(xs, ys, "o", color=color, label=label)
    if report.K_hypothesis is not None:
        ax.axhline(float(report.K_hypothesis), linestyle="--",
                   color="tab:green", label="K hypothesis")
    ax.set_xlabel("block index r")
    ax.set_ylabel("certified lower bound L_r")
    ax.set_xticks(rs)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    figure.tight_layout()
    _save(figure, path)
