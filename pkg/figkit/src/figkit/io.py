"""Readers for the lab's run-artifact files.

This package deliberately parses the documented on-disk formats itself (it
must work on artifacts without the producing code installed):

  diagnostics.csv   header t,dev_linear,dev_drift,E,G,E_t,G_t; decimal text
  snapshots/*/      meta.json + u1.f64/u2.f64, raw little-endian float64,
                    shape (Ny, Nx) row-major with x fastest
  pulse.json        first-pulse reports keyed by channel (nullable)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EXPECTED_HEADER = ["t", "dev_linear", "dev_drift", "E", "G", "E_t", "G_t"]


@dataclass
class Series:
    t: np.ndarray
    channels: dict[str, np.ndarray]


@dataclass
class Snapshot:
    t: float
    Lx: float
    x: np.ndarray
    y: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


@dataclass
class Pulse:
    t_min: float
    m: float
    t_max: float
    M: float
    sigma: float
    t_end: float | None


def read_series(artifact_dir) -> Series:
    path = Path(artifact_dir) / "diagnostics.csv"
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    if header != EXPECTED_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return Series(
        t=data[:, 0],
        channels={name: data[:, i + 1] for i, name in enumerate(EXPECTED_HEADER[1:])},
    )


def read_snapshot(snap_dir) -> Snapshot:
    d = Path(snap_dir)
    meta = json.loads((d / "meta.json").read_text())
    ny, nx = int(meta["Ny"]), int(meta["Nx"])
    u1 = np.frombuffer((d / "u1.f64").read_bytes(), dtype="<f8").reshape(ny, nx)
    u2 = np.frombuffer((d / "u2.f64").read_bytes(), dtype="<f8").reshape(ny, nx)
    y = np.asarray(meta["y_nodes"], dtype=float)
    x = float(meta["Lx"]) * np.arange(nx) / nx
    return Snapshot(t=float(meta["t"]), Lx=float(meta["Lx"]),
                    x=x, y=y, u1=u1.copy(), u2=u2.copy())


def list_snapshots(artifact_dir) -> list[Snapshot]:
    root = Path(artifact_dir) / "snapshots"
    if not root.is_dir():
        return []
    snaps = [read_snapshot(p) for p in sorted(root.iterdir())
             if (p / "meta.json").exists()]
    return sorted(snaps, key=lambda s: s.t)


def read_pulse(artifact_dir, channel: str) -> Pulse | None:
    path = Path(artifact_dir) / "pulse.json"
    if not path.exists():
        return None
    entry = json.loads(path.read_text()).get(channel)
    if entry is None:
        return None
    return Pulse(t_min=entry["t_min"], m=entry["m"], t_max=entry["t_max"],
                 M=entry["M"], sigma=entry["sigma"], t_end=entry.get("t_end"))
