"""Report figures.

All figures go through :func:`_save`, which strips PNG metadata so the same
data always produce the same bytes.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .graph import TALLY_FIELDS, CommTally, DegreeDistribution  # noqa: E402
from .hiermodel import PowerLawFit  # noqa: E402
from .temporal import TimeSeries  # noqa: E402

RC = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "orgnet",
}


def _save(fig, path: str | os.PathLike) -> None:
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_degree_distribution(dist: DegreeDistribution, path, fit: PowerLawFit | None = None) -> None:
    ws, ns = dist.points()
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.loglog(ws, ns, "o", ms=3, mfc="none", color="0.25", label="nodes")
        if fit is not None and len(ws):
            lo = max(fit.w_cutoff, ws.min())
            grid = np.geomspace(lo, ws.max(), 50)
            ax.loglog(
                grid,
                np.exp(fit.predict_log_n(grid)),
                "r-",
                lw=1.2,
                label=f"log n = {fit.intercept:.2f} - {fit.beta:.2f} log w",
            )
            ax.axvline(fit.w_cutoff, color="0.6", ls=":", lw=0.8)
            ax.legend(frameon=False)
        ax.set_xlabel("out-degree w")
        ax.set_ylabel("number of nodes n")
        fig.tight_layout()
        _save(fig, path)


def plot_time_series(emails: TimeSeries, senders: TimeSeries, path) -> None:
    t0 = emails.start_epoch
    days = (np.asarray(emails.bin_starts) - t0) / 86400.0
    with plt.rc_context(RC):
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
        top.plot(days, emails.counts, lw=0.4, color="tab:blue")
        top.set_ylabel("emails / bin")
        bottom.plot(days, senders.counts, lw=0.4, color="tab:orange")
        bottom.set_ylabel("senders / bin")
        bottom.set_xlabel("days since window start")
        fig.tight_layout()
        _save(fig, path)


def plot_tally(tally: CommTally, path, include_other: bool = False) -> None:
    cats = sorted(tally.counts)
    fields = [f for f in TALLY_FIELDS if include_other or not f.endswith("_other")]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 4))
        x = np.arange(len(cats))
        width = 0.8 / max(len(fields), 1)
        for k, f in enumerate(fields):
            ax.bar(x + k * width, [tally.get(c, f) for c in cats], width, label=f.replace("_", " "))
        ax.set_xticks(x + width * (len(fields) - 1) / 2)
        ax.set_xticklabels(cats, rotation=30, ha="right")
        ax.set_ylabel("emails")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
