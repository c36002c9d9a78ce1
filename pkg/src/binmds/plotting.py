"""Figure for a bandwidth report: per-node bits downloaded and accessed."""

from __future__ import annotations

from pathlib import Path

from .repair import BandwidthReport


def plot_report(report: BandwidthReport, path: str | Path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    nodes = [n.node for n in report.per_node]
    down = [n.bits_downloaded for n in report.per_node]
    acc = [n.bits_accessed for n in report.per_node]
    width = 0.38

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(nodes) + 2), 3.2))
    ax.bar([x - width / 2 for x in nodes], down, width, label="downloaded", color="#4477aa")
    ax.bar([x + width / 2 for x in nodes], acc, width, label="accessed", color="#ee6677")
    ax.axhline(float(report.lower_bound), color="k", lw=1, label="lower bound dl/(d-k+1)")
    ax.axhline(float(report.average_accessed), color="#ee6677", lw=1, ls="--",
               label="mean accessed")
    ax.set_xticks(nodes)
    ax.set_xlabel("failed node")
    ax.set_ylabel("bits")
    ax.set_title(f"{report.kind} ({report.k + report.r},{report.k},{report.l}), d={report.d}")
    ax.set_ylim(0, max(acc) * 1.25)
    ax.legend(fontsize=7, loc="upper left", ncol=2, frameon=False)
    fig.tight_layout()

    path = Path(path)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
