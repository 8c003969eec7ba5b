"""Scalar observables of a run: deviations, energy, enstrophy, pulse metrics.

Deviation channels are unnormalized L2 norms of the velocity difference from
either the fixed linear shear (y, 0) or the slowly drifting oscillatory shear
at the matching time.  Energy and enstrophy are

    E = int (u1^2 + u2^2),   G = int Omega^2,

and their viscous decay rates follow from the momentum/vorticity equations:

    E_t = 2 eps int u_i lap(u_i),   G_t = 2 eps int Omega lap(Omega).

Both vanish identically at eps = 0 (inviscid invariants), and E_t/G_t equal
dE/dt and dG/dt exactly in the continuum, which the solver tests exploit.

Pulse detection measures the transient rise-and-fall of a deviation series:
after light smoothing, the first minimum m, the following maximum M, and the
uphill exponential rate sigma = ln(M/m) / (t_max - t_min).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FlowField, ScalarField, integrate, l2_norm, laplacian, vorticity
from .shear import DriftState, couette_field, drift_field

CHANNELS = ("dev_linear", "dev_drift", "E", "G", "E_t", "G_t")


@dataclass
class DiagnosticSeries:
    """Time-stamped scalar channels sampled along one run."""

    t: np.ndarray
    channels: dict[str, np.ndarray]
    sample_interval: float

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1:
            raise ValueError("time stamps must be one-dimensional")
        if self.t.size >= 2 and not np.all(np.diff(self.t) > 0):
            raise ValueError("time stamps must be strictly increasing")
        for name, vals in self.channels.items():
            vals = np.asarray(vals, dtype=float)
            if vals.shape != self.t.shape:
                raise ValueError(f"channel {name} length mismatch")
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"channel {name} contains non-finite samples")
            self.channels[name] = vals

    def __len__(self):
        return self.t.size


@dataclass
class PulseReport:
    """First transient pulse of a deviation series.

    t_end is the time of the first post-peak minimum when the record is long
    enough to contain it, else None.
    """

    t_min: float
    m: float
    t_max: float
    M: float
    delta_t: float
    sigma: float
    smooth_window: int
    t_end: float | None = None

    def __post_init__(self):
        if not (self.t_max > self.t_min):
            raise ValueError("pulse must have t_max > t_min")
        if not (self.M >= self.m > 0):
            raise ValueError("pulse extrema must satisfy M >= m > 0")


class NoPulseError(RuntimeError):
    """The series contains no completed rise-and-fall."""


def deviation_from_linear(u: FlowField) -> float:
    base = couette_field(u.grid)
    diff = FlowField.from_arrays(
        u.grid, u.u1.values - base.u1.values, u.u2.values - base.u2.values
    )
    return l2_norm(diff)


def deviation_from_drift(u: FlowField, d: DriftState) -> float:
    if u.t is not None and abs(u.t - d.t) > 1e-9:
        raise ValueError(f"field time {u.t} does not match drift time {d.t}")
    base = drift_field(d, u.grid)
    diff = FlowField.from_arrays(
        u.grid, u.u1.values - base.u1.values, u.u2.values - base.u2.values
    )
    return l2_norm(diff)


def energy(u: FlowField) -> float:
    return l2_norm(u) ** 2


def enstrophy(u: FlowField) -> float:
    w = vorticity(u)
    return integrate(ScalarField(u.grid, w.values**2))


def energy_rate(u: FlowField, epsilon: float) -> float:
    if epsilon == 0.0:
        return 0.0
    g = u.grid
    term = u.u1.values * laplacian(g, u.u1.values) + u.u2.values * laplacian(
        g, u.u2.values
    )
    return 2.0 * epsilon * integrate(ScalarField(g, term))


def enstrophy_rate(u: FlowField, epsilon: float) -> float:
    if epsilon == 0.0:
        return 0.0
    g = u.grid
    w = vorticity(u).values
    return 2.0 * epsilon * integrate(ScalarField(g, w * laplacian(g, w)))


def growth_rate(m: float, M: float, dt: float) -> float:
    """Uphill exponential rate ln(M/m)/dt."""
    if m <= 0 or M <= 0 or dt <= 0:
        raise ValueError("growth rate needs positive m, M, and dt")
    return math.log(M / m) / dt


def smooth_series(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with edge replication; window forced odd."""
    values = np.asarray(values, dtype=float)
    if window <= 1:
        return values.copy()
    if window % 2 == 0:
        window += 1
    half = window // 2
    padded = np.concatenate(
        (np.full(half, values[0]), values, np.full(half, values[-1]))
    )
    kernel = np.full(window, 1.0 / window)
    return np.convolve(padded, kernel, mode="valid")


def _first_pulse_indices(s: np.ndarray) -> tuple[int, int, int | None]:
    """Indices (i_min, i_max, i_end) in a smoothed series.

    i_min: earliest index attaining the running minimum before the first
    strict rise; i_max: earliest index attaining the peak before the first
    strict fall after that rise; i_end: earliest index of the first post-peak
    minimum (None when the record ends while still falling).  Plateaus break
    ties toward the earliest index.
    """
    d = np.diff(s)
    rises = np.nonzero(d > 0)[0]
    if rises.size == 0:
        raise NoPulseError("series never rises; no pulse")
    r = int(rises[0])
    i_min = int(np.argmin(s[: r + 1]))

    falls = np.nonzero(d[r + 1:] < 0)[0]
    if falls.size == 0:
        raise NoPulseError("series never turns over after rising; no pulse")
    f = int(falls[0]) + r + 1
    seg = s[i_min : f + 1]
    i_max = i_min + int(np.argmax(seg))

    i_end = None
    rises2 = np.nonzero(d[f:] > 0)[0]
    if rises2.size:
        r2 = int(rises2[0]) + f
        i_end = i_max + int(np.argmin(s[i_max : r2 + 1]))
    return i_min, i_max, i_end


def detect_first_pulse(series: DiagnosticSeries, channel: str,
                       smooth_window: int = 5) -> PulseReport:
    """Locate the first pulse of a channel and report its growth rate."""
    if channel not in series.channels:
        raise KeyError(f"unknown channel {channel!r}")
    v = series.channels[channel]
    if v.size < 3 * max(smooth_window, 1):
        raise ValueError("series too short for pulse detection")
    s = smooth_series(v, smooth_window)
    i_min, i_max, i_end = _first_pulse_indices(s)
    m, M = float(s[i_min]), float(s[i_max])
    t_min, t_max = float(series.t[i_min]), float(series.t[i_max])
    return PulseReport(
        t_min=t_min,
        m=m,
        t_max=t_max,
        M=M,
        delta_t=t_max - t_min,
        sigma=growth_rate(m, M, t_max - t_min),
        smooth_window=smooth_window,
        t_end=float(series.t[i_end]) if i_end is not None else None,
    )
