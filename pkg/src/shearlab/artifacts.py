"""Run artifact persistence.

One run directory is self-describing and readable without this package:

    <run>/
      config.yaml        canonical config (round-trips losslessly)
      status.json        completion status, warnings, wall-clock metadata
      diagnostics.csv    t,dev_linear,dev_drift,E,G,E_t,G_t (full precision)
      pulse.json         first-pulse reports for both deviation channels
      snapshots/
        snap_0000/
          meta.json      grid dims, Lx, t, config hash, layout notes, y nodes
          u1.f64         raw little-endian float64, (Ny, Nx) row-major
          u2.f64         (x is the fastest index)

Spectrum artifacts hold spectra/<name>.csv tables instead of the time series.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config, save_config
from .diagnostics import (
    CHANNELS,
    DiagnosticSeries,
    NoPulseError,
    PulseReport,
    detect_first_pulse,
)

CSV_HEADER = "t," + ",".join(CHANNELS)
SNAPSHOT_DTYPE = "<f8"


@dataclass
class RunArtifact:
    """Handle to a persisted run directory."""

    path: Path
    config: ExperimentConfig
    status: str
    error: str | None
    warnings: list[str]

    @property
    def diagnostics_path(self) -> Path:
        return self.path / "diagnostics.csv"

    @property
    def snapshot_dir(self) -> Path:
        return self.path / "snapshots"

    @classmethod
    def load(cls, path) -> "RunArtifact":
        path = Path(path)
        cfg, _ = load_config(path / "config.yaml")
        meta = json.loads((path / "status.json").read_text())
        return cls(path=path, config=cfg, status=meta["status"],
                   error=meta.get("error"), warnings=meta.get("warnings", []))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_diagnostics_csv(path, series: DiagnosticSeries) -> None:
    lines = [CSV_HEADER]
    cols = [series.t] + [series.channels[name] for name in CHANNELS]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_diagnostics_csv(path) -> DiagnosticSeries:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    if header != CSV_HEADER.split(","):
        raise ValueError(f"unexpected diagnostics header {header}")
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    t = rows[:, 0]
    channels = {name: rows[:, i + 1] for i, name in enumerate(CHANNELS)}
    interval = float(t[1] - t[0]) if t.size >= 2 else 0.0
    return DiagnosticSeries(t=t, channels=channels, sample_interval=interval)


def write_snapshot(dirpath, flow, config_hash: str) -> None:
    d = Path(dirpath)
    d.mkdir(parents=True, exist_ok=True)
    g = flow.grid
    meta = {
        "t": flow.t,
        "Lx": g.Lx,
        "Nx": g.Nx,
        "Ny": g.Ny,
        "config_hash": config_hash,
        "dtype": SNAPSHOT_DTYPE,
        "layout": "row-major (Ny, Nx), x fastest",
        "y_nodes": [float(v) for v in g.y],
    }
    (d / "meta.json").write_text(json.dumps(meta, indent=1))
    (d / "u1.f64").write_bytes(
        np.ascontiguousarray(flow.u1.values, dtype=SNAPSHOT_DTYPE).tobytes()
    )
    (d / "u2.f64").write_bytes(
        np.ascontiguousarray(flow.u2.values, dtype=SNAPSHOT_DTYPE).tobytes()
    )


def read_snapshot(dirpath) -> tuple[dict, np.ndarray, np.ndarray]:
    d = Path(dirpath)
    meta = json.loads((d / "meta.json").read_text())
    shape = (meta["Ny"], meta["Nx"])
    u1 = np.frombuffer((d / "u1.f64").read_bytes(), dtype=SNAPSHOT_DTYPE).reshape(shape)
    u2 = np.frombuffer((d / "u2.f64").read_bytes(), dtype=SNAPSHOT_DTYPE).reshape(shape)
    return meta, u1.copy(), u2.copy()


def list_snapshots(artifact_dir) -> list[Path]:
    root = Path(artifact_dir) / "snapshots"
    if not root.is_dir():
        return []
    return sorted(p for p in root.iterdir() if (p / "meta.json").exists())


def _pulse_dict(series: DiagnosticSeries, channel: str, smooth_window: int):
    try:
        return dataclasses.asdict(
            detect_first_pulse(series, channel, smooth_window)
        )
    except (NoPulseError, ValueError):
        return None


def write_run_artifact(out_dir, result, warnings=(),
                       smooth_window: int = 5) -> RunArtifact:
    """Persist a RunResult; partial results are flushed with failure status."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    save_config(cfg, out / "config.yaml")
    write_diagnostics_csv(out / "diagnostics.csv", result.series)
    chash = cfg.config_hash()
    for i, snap in enumerate(result.snapshots):
        write_snapshot(out / "snapshots" / f"snap_{i:04d}", snap, chash)
    pulses = {
        "smooth_window": smooth_window,
        "dev_linear": _pulse_dict(result.series, "dev_linear", smooth_window),
        "dev_drift": _pulse_dict(result.series, "dev_drift", smooth_window),
    }
    (out / "pulse.json").write_text(json.dumps(pulses, indent=1))
    status = {
        "status": result.status,
        "error": result.error,
        "warnings": list(warnings),
        "config_hash": chash,
        "n_steps": result.n_steps,
        "final_dt": result.final_dt,
        "max_bc_residual": result.max_bc_residual,
        "wall_time_s": result.wall_time_s,
        "created_unix": time.time(),
    }
    (out / "status.json").write_text(json.dumps(status, indent=1))
    return RunArtifact(path=out, config=cfg, status=result.status,
                       error=result.error, warnings=list(warnings))


def read_pulse_report(artifact_dir, channel: str) -> PulseReport | None:
    data = json.loads((Path(artifact_dir) / "pulse.json").read_text())
    entry = data.get(channel)
    return None if entry is None else PulseReport(**entry)


SPECTRUM_HEADER = "profile,kind,alpha,R,re_c,im_c,growth,retained"


def write_spectrum_csv(path, results, label: str) -> None:
    """Serialize SpectrumResult rows; spurious candidates carry retained=0."""
    lines = [SPECTRUM_HEADER]
    for res in results:
        rcol = "" if res.R is None else _fmt(res.R)
        for c, gr in zip(res.eigenvalues, res.growth_rates):
            lines.append(
                f"{label},{res.kind},{_fmt(res.alpha)},{rcol},"
                f"{_fmt(c.real)},{_fmt(c.imag)},{_fmt(gr)},1"
            )
        for c in res.spurious:
            lines.append(
                f"{label},{res.kind},{_fmt(res.alpha)},{rcol},"
                f"{_fmt(c.real)},{_fmt(c.imag)},{_fmt(res.alpha * c.imag)},0"
            )
    Path(path).write_text("\n".join(lines) + "\n")
