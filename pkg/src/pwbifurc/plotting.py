"""Figure rendering for sweep reports.

Renders the bifurcation diagram (attractor points over mu, rescaled by mu
so the cascade is readable across decades) with a Lyapunov panel below,
and overlays the closed-form interval markers.  Written for file output
only; the Agg backend is forced so no display is ever needed.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_sweep_figure(records, markers, path: str, log_scale: bool = True, dpi: int = 150):
    """Render diagram + Lyapunov panels to an image file.

    Points are plotted as x/mu against mu, which keeps the trapping
    interval [nu, 1] fixed on the vertical axis for every sample.
    """
    kept = [r for r in records if not r.skipped]
    fig, (ax_d, ax_l) = plt.subplots(
        2, 1, sharex=True, figsize=(8.0, 6.0),
        gridspec_kw={"height_ratios": [3, 1]},
    )

    if kept:
        mu_cols = np.concatenate([np.full(len(r.points), r.mu) for r in kept])
        x_cols = np.concatenate([r.points / r.mu for r in kept])
        ax_d.plot(mu_cols, x_cols, ",", color="black", alpha=0.6, rasterized=True)
        ax_l.plot(
            [r.mu for r in kept], [r.lyapunov for r in kept],
            ".-", color="tab:blue", lw=0.8, ms=2.5,
        )
    ax_l.axhline(0.0, color="gray", lw=0.6)

    for iv in markers:
        ax_d.axvline(iv.mu_low, color="tab:red", lw=0.7, ls="--", alpha=0.8)
        ax_d.axvline(iv.mu_high, color="tab:green", lw=0.7, ls=":", alpha=0.8)
        ax_d.text(
            iv.mu_high, 1.01, f"M={iv.M}", ha="right", va="bottom",
            fontsize=7, transform=ax_d.get_xaxis_transform(),
        )

    if log_scale:
        ax_d.set_xscale("log")
    ax_d.set_ylabel("x / mu")
    ax_l.set_ylabel("Lyapunov")
    ax_l.set_xlabel("mu")
    fig.tight_layout()
    # strip the writer software tag so reruns stay byte-stable
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    plt.close(fig)
    return path
