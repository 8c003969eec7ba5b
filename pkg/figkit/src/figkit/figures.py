"""The four figure kinds regenerated from run artifacts.

  snapshots        velocity-field panels with the linear shear subtracted
  deviation        L2 deviation from the linear shear vs time
  drift-deviation  L2 deviation from the slowly drifting shear vs time
  energy-enstrophy six-panel sheet: E, G, their decay rates, and first-pulse
                   close-ups of the rates

Figure generation never mutates the artifact; rendering twice produces the
same image.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import list_snapshots, read_pulse, read_series

FIGURE_KINDS = ("snapshots", "deviation", "drift-deviation", "energy-enstrophy")


class FigureError(RuntimeError):
    pass


def _select_snapshots(artifact_dir, times):
    snaps = list_snapshots(artifact_dir)
    if not snaps:
        raise FigureError(f"no snapshots in {artifact_dir}")
    if times is None:
        return snaps
    chosen, missing = [], []
    have = np.array([s.t for s in snaps])
    for want in times:
        i = int(np.argmin(np.abs(have - want)))
        if abs(have[i] - want) <= 0.5:
            chosen.append(snaps[i])
        else:
            missing.append(want)
    if missing:
        raise FigureError(
            f"snapshots missing for t = {missing}; available t = {list(have)}"
        )
    return chosen


def plot_snapshots(artifact_dir, out_path, times=None) -> Path:
    """Quiver panels of u - (y, 0) at the requested (or all) snapshot times."""
    snaps = _select_snapshots(artifact_dir, times)
    n = len(snaps)
    ncol = 2 if n > 1 else 1
    nrow = (n + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(5.0 * ncol, 2.9 * nrow),
                             squeeze=False)
    for ax in axes.ravel()[n:]:
        ax.axis("off")
    for ax, snap in zip(axes.ravel(), snaps):
        du1 = snap.u1 - snap.y[:, None]
        sx = max(1, snap.x.size // 24)
        sy = max(1, snap.y.size // 16)
        ax.quiver(snap.x[::sx], snap.y[::sy], du1[::sy, ::sx],
                  snap.u2[::sy, ::sx], scale_units="xy", angles="xy")
        ax.set_title(f"t = {snap.t:.4g}", fontsize=9)
        ax.set_xlim(0.0, snap.Lx)
        ax.set_ylim(0.0, 1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.suptitle("velocity field, linear shear subtracted", fontsize=10)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def _plot_deviation(artifact_dir, out_path, channel: str, title: str) -> Path:
    series = read_series(artifact_dir)
    if channel not in series.channels:
        raise FigureError(f"unknown channel {channel!r}")
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(series.t, series.channels[channel], lw=1.1, label=channel)
    pulse = read_pulse(artifact_dir, channel)
    if pulse is not None:
        ax.plot([pulse.t_min, pulse.t_max], [pulse.m, pulse.M], "o",
                ms=4, color="crimson")
        ax.axvline(pulse.t_min, color="0.75", ls=":", lw=0.8)
        ax.axvline(pulse.t_max, color="0.75", ls=":", lw=0.8)
        if pulse.t_end is not None:
            ax.axvline(pulse.t_end, color="0.85", ls="--", lw=0.8)
        ax.set_title(f"{title}   (sigma = {pulse.sigma:.3f})", fontsize=10)
    else:
        ax.set_title(title, fontsize=10)
    ax.set_xlabel("t")
    ax.set_ylabel("L2 norm")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def plot_deviation_series(artifact_dir, out_path) -> Path:
    return _plot_deviation(artifact_dir, out_path, "dev_linear",
                           "deviation from the linear shear")


def plot_drift_deviation_series(artifact_dir, out_path) -> Path:
    return _plot_deviation(artifact_dir, out_path, "dev_drift",
                           "deviation from the drifting shear")


def plot_energy_enstrophy(artifact_dir, out_path) -> Path:
    """Six panels: E, G, E_t, G_t over the run plus first-pulse close-ups."""
    series = read_series(artifact_dir)
    pulse = read_pulse(artifact_dir, "dev_drift")
    if pulse is not None:
        lo = pulse.t_min
        hi = pulse.t_end if pulse.t_end is not None else pulse.t_max
    else:
        lo, hi = series.t[0], series.t[series.t.size // 2]
    window = (series.t >= lo) & (series.t <= hi)
    if window.sum() < 2:
        window = slice(None)

    fig, axes = plt.subplots(3, 2, figsize=(9, 8.5))
    panels = (
        ("E", slice(None), "E(t)"),
        ("G", slice(None), "G(t)"),
        ("E_t", slice(None), "E_t(t)"),
        ("G_t", slice(None), "G_t(t)"),
        ("E_t", window, "E_t, first pulse"),
        ("G_t", window, "G_t, first pulse"),
    )
    for ax, (name, sel, title) in zip(axes.ravel(), panels):
        ax.plot(series.t[sel], series.channels[name][sel], lw=1.0)
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def render(kind: str, artifact_dir, out_path, times=None) -> Path:
    if kind == "snapshots":
        return plot_snapshots(artifact_dir, out_path, times)
    if kind == "deviation":
        return plot_deviation_series(artifact_dir, out_path)
    if kind == "drift-deviation":
        return plot_drift_deviation_series(artifact_dir, out_path)
    if kind == "energy-enstrophy":
        return plot_energy_enstrophy(artifact_dir, out_path)
    raise FigureError(f"unknown figure kind {kind!r}; one of {FIGURE_KINDS}")
