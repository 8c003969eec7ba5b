"""Synthesizes a run artifact directory in the documented on-disk format."""

import json

import numpy as np
import pytest


def _write_snapshot(root, idx, t, Lx, Nx, Ny, amp):
    d = root / "snapshots" / f"snap_{idx:04d}"
    d.mkdir(parents=True)
    # CGL-like nodes, walls exact
    y = (1 - np.cos(np.pi * np.arange(Ny) / (Ny - 1))) / 2
    x = Lx * np.arange(Nx) / Nx
    u1 = y[:, None] + amp * np.sin(2 * np.pi * x[None, :] / Lx) * np.sin(np.pi * y[:, None])
    u2 = amp * np.cos(2 * np.pi * x[None, :] / Lx) * np.sin(np.pi * y[:, None]) ** 2
    meta = {
        "t": t,
        "Lx": Lx,
        "Nx": Nx,
        "Ny": Ny,
        "config_hash": "feedc0de",
        "dtype": "<f8",
        "layout": "row-major (Ny, Nx), x fastest",
        "y_nodes": [float(v) for v in y],
    }
    (d / "meta.json").write_text(json.dumps(meta))
    (d / "u1.f64").write_bytes(u1.astype("<f8").tobytes())
    (d / "u2.f64").write_bytes(u2.astype("<f8").tobytes())
    return u1, u2


@pytest.fixture
def artifact(tmp_path):
    """A small, fully synthetic but format-faithful run artifact."""
    root = tmp_path / "run"
    root.mkdir()
    t = np.round(np.arange(0.0, 60.0 + 1e-9, 0.5), 10)
    sigma, t_peak = 0.12, 25.0
    dev_drift = np.where(
        t <= t_peak,
        0.01 * np.exp(sigma * t),
        0.01 * np.exp(sigma * t_peak) * np.exp(-0.06 * (t - t_peak)),
    )
    dev_linear = dev_drift + 0.06
    E = 2.0 / 3.0 + 0.01 * np.sin(0.2 * t)
    G = 2.7 + 0.3 * np.cos(0.15 * t)
    E_t = 2e-4 * np.cos(0.2 * t)
    G_t = -2e-2 * np.sin(0.15 * t)
    header = "t,dev_linear,dev_drift,E,G,E_t,G_t"
    rows = [header]
    for vals in zip(t, dev_linear, dev_drift, E, G, E_t, G_t):
        rows.append(",".join(format(v, ".17g") for v in vals))
    (root / "diagnostics.csv").write_text("\n".join(rows) + "\n")

    pulses = {
        "smooth_window": 5,
        "dev_linear": None,
        "dev_drift": {
            "t_min": 0.0, "m": 0.01, "t_max": float(t_peak),
            "M": float(0.01 * np.exp(sigma * t_peak)),
            "delta_t": float(t_peak), "sigma": sigma,
            "smooth_window": 5, "t_end": None,
        },
    }
    (root / "pulse.json").write_text(json.dumps(pulses))

    snaps = {}
    for i, ts in enumerate((0.0, 4.9, 14.9, 24.9)):
        snaps[ts] = _write_snapshot(root, i, ts, 2.0, 32, 17, amp=0.02 * (i + 1))
    (root / "status.json").write_text(json.dumps({"status": "completed"}))
    return root
