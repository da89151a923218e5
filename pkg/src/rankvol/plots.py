"""Figure rendering for report output.

Uses the Agg backend so runs work headless; every figure goes to a file next
to the delimited output, never to a display.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_gradient_figure(report: dict, path: str | Path) -> Path:
    """Per-level ratio curves: volume upper and rank gradient lower vs index."""
    plt = _pyplot()
    levels = report["levels"]
    indices = [lv["index"] for lv in levels]
    vol = [float(Fraction(lv["volume_ratio"]["fraction"])) for lv in levels]
    running = [float(Fraction(lv["running_min_volume"]["fraction"])) for lv in levels]
    rank = [float(max(Fraction(lv["rank_gradient_raw"]["fraction"]), Fraction(0))) for lv in levels]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(indices, vol, "o-", color="#1f77b4", label="volume upper / index")
    ax.plot(indices, running, "--", color="#1f77b4", alpha=0.5, label="running min")
    ax.plot(indices, rank, "s-", color="#d62728", label="(rank lower - 1) / index")
    for kv in report.get("known_values", ()):
        color = "#1f77b4" if "volume" in kv["quantity"] else "#d62728"
        ax.axhline(kv["value"], color=color, linestyle=":", alpha=0.6)
        ax.annotate(
            "%s = %g" % (kv["quantity"], kv["value"]),
            xy=(indices[-1], kv["value"]),
            fontsize=7,
            ha="right",
            va="bottom",
            color=color,
        )
    if len(indices) > 1 and indices[-1] / max(1, indices[0]) >= 8:
        ax.set_xscale("log", base=2)
    ax.set_xlabel("subgroup index")
    ax.set_ylabel("ratio")
    ax.set_title("%s: certified ratios along the chain" % report["manifold"]["name"])
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_simplify_figure(trace, initial: int, path: str | Path) -> Path:
    """Facet count of the best-seen triangulation against proposals used."""
    plt = _pyplot()
    xs = [0] + [p for p, _ in trace]
    ys = [initial] + [c for _, c in trace]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.step(xs, ys, where="post", color="#2ca02c")
    ax.set_xlabel("proposals")
    ax.set_ylabel("facets (best seen)")
    ax.set_title("bistellar simplification progress")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
