"""Figure rendering for CLI reports (opt-in via --plot).

Figures are a convenience next to the CSV/JSON contract, rendered
deterministically: Agg backend, fixed size/dpi, PNG metadata pinned so two
runs produce byte-identical files.
"""

from __future__ import annotations

_SAVEKW = dict(dpi=110, metadata={"Software": "ifslab"})


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _finish(fig, path):
    fig.savefig(path, **_SAVEKW)
    _plt().close(fig)


def plot_series(path, xs, series: dict, xlabel: str, ylabel: str, title: str):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for label, ys in sorted(series.items()):
        ax.plot(xs, ys, marker="o", ms=3, lw=1, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _finish(fig, path)


def plot_level_fractions(path, stats_rows, title: str):
    """stats_rows: (level, uniform_frac, atomic_frac, mean_hm)."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    levels = [r[0] for r in stats_rows]
    ax.plot(levels, [r[1] for r in stats_rows], "o-", ms=3, lw=1, label="uniform frac")
    ax.plot(levels, [r[2] for r in stats_rows], "s-", ms=3, lw=1, label="atomic frac")
    ax.plot(levels, [r[3] for r in stats_rows], "^-", ms=3, lw=1, label="mean H_m")
    ax.set_xlabel("level")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _finish(fig, path)


def plot_cover(path, interval, pieces, title: str):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 1.8))
    lo, hi = float(interval[0]), float(interval[1])
    ax.broken_barh([(float(a), max(float(b) - float(a), (hi - lo) * 2e-3))
                    for a, b in pieces], (0.2, 0.6))
    ax.set_xlim(lo, hi)
    ax.set_yticks([])
    ax.set_xlabel("parameter t")
    ax.set_title(title)
    fig.tight_layout()
    _finish(fig, path)
