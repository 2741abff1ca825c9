"""Static figure rendering (needs the optional matplotlib dependency)."""
from __future__ import annotations

from . import basis as b


def plot_series(series, path, title=""):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    for i, name in enumerate(b.NAMES):
        if series.populations[:, i].max() > 1e-3:
            axes[0].plot(series.times, series.populations[:, i], label=name)
    axes[0].set_ylabel("population")
    axes[0].legend(ncol=4, fontsize=7)
    axes[1].plot(series.times, series.photon_rate)
    axes[1].set_ylabel("photon rate (1/us)")
    axes[2].plot(series.times, series.entropy_total, label="S")
    axes[2].plot(series.times, series.entropy_atoms, label="S_a")
    axes[2].plot(series.times, series.entropy_photons, label="S_p")
    axes[2].set_ylabel("entropy (nats)")
    axes[2].set_xlabel("t (us)")
    axes[2].legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
