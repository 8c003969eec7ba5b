"""The oscillatory shear family, its viscous drift, and the instability window.

The family is U(y) = y + (c/n) sin(4 n pi y) with u2 = 0: a single high-
frequency Fourier mode riding on the linear Couette profile.  Both wall
values match the Couette boundary data exactly because sin(4 n pi y)
vanishes at y = 0 and y = 1.

Under viscous dynamics the oscillatory part is an exact solution that decays
as exp(-eps (4 n pi)^2 t); the family is inviscidly unstable for amplitude
parameters c inside the open window (1/(8 pi), 1/(4 pi)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import ChannelGrid, FlowField

WINDOW_LOW = 1.0 / (8.0 * math.pi)
WINDOW_HIGH = 1.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class ShearProfile:
    c: float
    n: int

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"amplitude parameter c must be positive, got {self.c}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"mode index n must be a positive integer, got {self.n}")

    @property
    def wavenumber(self) -> float:
        """Wall-normal wavenumber of the oscillatory part, 4*n*pi."""
        return 4.0 * self.n * math.pi

    def u(self, y: np.ndarray) -> np.ndarray:
        return y + (self.c / self.n) * np.sin(self.wavenumber * y)

    def upp(self, y: np.ndarray) -> np.ndarray:
        """Second derivative of the profile (analytic)."""
        return -(self.c / self.n) * self.wavenumber**2 * np.sin(self.wavenumber * y)


@dataclass(frozen=True)
class DriftState:
    """Oscillatory shear with its amplitude decayed to time t at viscosity eps."""

    profile: ShearProfile
    epsilon: float
    t: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.t < 0:
            raise ValueError("t must be nonnegative")

    def amplitude(self) -> float:
        """Velocity-oscillation amplitude (c/n) exp(-eps (4 n pi)^2 t)."""
        p = self.profile
        return (p.c / p.n) * math.exp(-self.epsilon * p.wavenumber**2 * self.t)

    def u(self, y: np.ndarray) -> np.ndarray:
        return y + self.amplitude() * np.sin(self.profile.wavenumber * y)


def shear_field(p: ShearProfile, g: ChannelGrid) -> FlowField:
    u1 = np.tile(p.u(g.y)[:, None], (1, g.Nx))
    return FlowField.from_arrays(g, u1, np.zeros((g.Ny, g.Nx)), t=0.0)


def drift_field(d: DriftState, g: ChannelGrid) -> FlowField:
    u1 = np.tile(d.u(g.y)[:, None], (1, g.Nx))
    return FlowField.from_arrays(g, u1, np.zeros((g.Ny, g.Nx)), t=d.t)


def couette_field(g: ChannelGrid) -> FlowField:
    u1 = np.tile(g.y[:, None], (1, g.Nx))
    return FlowField.from_arrays(g, u1, np.zeros((g.Ny, g.Nx)))


def in_instability_window(c: float) -> bool:
    """True iff 1/(8 pi) < c < 1/(4 pi), strictly."""
    if not c > 0:
        raise ValueError("c must be positive")
    return WINDOW_LOW < c < WINDOW_HIGH


def drift_exit_time(c: float, n: int, epsilon: float) -> float:
    """Time for the drifting amplitude to reach the window's lower edge.

    Solves c * exp(-eps (4 n pi)^2 T) = 1/(8 pi), i.e.
    T = ln(8 pi c) / (eps (4 n pi)^2).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if c <= WINDOW_LOW:
        raise ValueError(
            f"c={c} is already at or below the window edge 1/(8 pi)={WINDOW_LOW:.6f}"
        )
    return math.log(8.0 * math.pi * c) / (epsilon * (4.0 * n * math.pi) ** 2)


def velocity_deviation_norm(p: ShearProfile, Lx: float) -> float:
    """Analytic ||U - y|| = (c/n) sqrt(Lx/2)."""
    return (p.c / p.n) * math.sqrt(Lx / 2.0)


def vorticity_deviation_norm(p: ShearProfile, Lx: float) -> float:
    """Analytic ||U' - 1|| = 4 pi c sqrt(Lx/2); independent of n."""
    return 4.0 * math.pi * p.c * math.sqrt(Lx / 2.0)
