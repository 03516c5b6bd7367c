"""Figure rendering for report outputs (file-based, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_staircase(st, path, title="covering staircase"):
    """Step plot of the lower/upper bit curves over the resolution grid."""
    ts = [e.t for e in st.entries]
    lo = [e.lower_bits for e in st.entries]
    up = [e.upper_bits for e in st.entries]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(ts, up, where="post", label="upper bits", color="tab:blue")
    ax.step(ts, lo, where="post", label="lower bits", color="tab:orange")
    ax.fill_between(ts, lo, up, step="post", alpha=0.2, color="tab:blue")
    ax.set_xscale("log")
    ax.set_xlabel("resolution t")
    ax.set_ylabel("log2 N")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_duality(report, path):
    """Primal and dual staircases of a duality report on shared axes."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for st, name, color in ((report.primal, "K vs tD", "tab:blue"),
                            (report.dual, "D vs tK°", "tab:red")):
        ts = [e.t for e in st.entries]
        ax.step(ts, [e.upper_bits for e in st.entries], where="post",
                color=color, label=f"{name} upper")
        ax.step(ts, [e.lower_bits for e in st.entries], where="post",
                color=color, linestyle="--", label=f"{name} lower")
    ax.set_xscale("log")
    ax.set_xlabel("resolution t")
    ax.set_ylabel("log2 N")
    ax.set_title("duality staircases")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_probe(probe, path):
    """Histogram of the conjecture-form ratio over the sampled family."""
    counts, edges = probe.histogram
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge",
           color="tab:green", alpha=0.8)
    ax.set_xlabel("M*(K∩D)·sqrt(n/k)")
    ax.set_ylabel("bodies")
    ax.set_title(f"{probe.family.kind} family, max={probe.max_ratio:.3f}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
