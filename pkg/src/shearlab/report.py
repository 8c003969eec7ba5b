"""Quick-look rendering of a run artifact: figures written next to the CSV.

This is the lab's own post-run report (deviation histories with pulse
markers, the energy/enstrophy sheet, and snapshot panels of the velocity
with the linear shear subtracted).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import list_snapshots, read_diagnostics_csv, read_pulse_report, read_snapshot


def _annotate_pulse(ax, pulse):
    if pulse is None:
        return
    ax.axvline(pulse.t_min, color="0.6", ls=":", lw=0.8)
    ax.axvline(pulse.t_max, color="0.6", ls=":", lw=0.8)
    if pulse.t_end is not None:
        ax.axvline(pulse.t_end, color="0.8", ls="--", lw=0.8)
    ax.annotate(
        f"sigma = {pulse.sigma:.3f}",
        xy=(pulse.t_max, pulse.M),
        xytext=(5, -2),
        textcoords="offset points",
        fontsize=8,
    )


def render_deviation_figure(artifact_dir, out_path) -> Path:
    series = read_diagnostics_csv(Path(artifact_dir) / "diagnostics.csv")
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), sharex=True)
    for ax, channel, title in zip(
        axes,
        ("dev_linear", "dev_drift"),
        ("deviation from linear shear", "deviation from drifting shear"),
    ):
        ax.plot(series.t, series.channels[channel], lw=1.0)
        ax.set_xlabel("t")
        ax.set_title(title, fontsize=10)
        _annotate_pulse(ax, read_pulse_report(artifact_dir, channel))
    axes[0].set_ylabel("L2 norm")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def render_energy_figure(artifact_dir, out_path) -> Path:
    series = read_diagnostics_csv(Path(artifact_dir) / "diagnostics.csv")
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, channel in zip(axes.ravel(), ("E", "G", "E_t", "G_t")):
        ax.plot(series.t, series.channels[channel], lw=1.0)
        ax.set_title(channel, fontsize=10)
    for ax in axes[-1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def render_snapshot_figure(artifact_dir, out_path, max_panels: int = 6) -> Path:
    snaps = list_snapshots(artifact_dir)
    if not snaps:
        raise FileNotFoundError(f"no snapshots under {artifact_dir}")
    snaps = snaps[:max_panels]
    ncol = min(2, len(snaps))
    nrow = (len(snaps) + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(5.2 * ncol, 2.8 * nrow),
                             squeeze=False)
    for ax in axes.ravel()[len(snaps):]:
        ax.axis("off")
    for ax, snap in zip(axes.ravel(), snaps):
        meta, u1, u2 = read_snapshot(snap)
        y = np.asarray(meta["y_nodes"])
        x = meta["Lx"] * np.arange(meta["Nx"]) / meta["Nx"]
        du1 = u1 - y[:, None]
        sx = max(1, meta["Nx"] // 24)
        sy = max(1, meta["Ny"] // 16)
        ax.quiver(x[::sx], y[::sy], du1[::sy, ::sx], u2[::sy, ::sx],
                  scale_units="xy", angles="xy")
        ax.set_title(f"t = {meta['t']:.3g}", fontsize=9)
        ax.set_xlim(0, meta["Lx"])
        ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def render_report(artifact_dir, out_dir=None) -> list[Path]:
    """Render all quick-look figures for one run artifact."""
    artifact_dir = Path(artifact_dir)
    out = Path(out_dir) if out_dir else artifact_dir / "figures"
    out.mkdir(parents=True, exist_ok=True)
    written = [
        render_deviation_figure(artifact_dir, out / "deviations.png"),
        render_energy_figure(artifact_dir, out / "energy_enstrophy.png"),
    ]
    if list_snapshots(artifact_dir):
        written.append(render_snapshot_figure(artifact_dir, out / "snapshots.png"))
    return written
