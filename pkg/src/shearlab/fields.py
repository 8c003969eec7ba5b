"""Channel grid, discrete fields, and the differential/integral operators.

The grid is tensor-product: uniform periodic nodes in x (period Lx), CGL
nodes in y on [0, 1] with both walls included.  Scalar data is stored as a
(Ny, Nx) array, row-major, so x is the fastest index.  Differentiation is
Fourier-spectral in x and Chebyshev-collocation in y; integration pairs the
periodic rectangle rule in x with Clenshaw-Curtis weights in y, the exact
discrete counterpart of the y discretization.

All norms are unnormalized integral norms: ||f||^2 = int_0^Lx int_0^1 f^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chebyshev import unit_diff_matrices, unit_nodes, unit_quad_weights

DIV_TOL = 1e-10


class ChannelGrid:
    """Discretization of the channel [0, Lx) x [0, 1].

    Attributes
    ----------
    x : (Nx,) uniform nodes, x[0] = 0, spacing Lx/Nx (right endpoint omitted)
    y : (Ny,) CGL nodes, y[0] = 0 and y[-1] = 1 exactly
    kx : (Nx//2+1,) rfft wavenumbers 2*pi*j/Lx
    Dy, Dy2 : collocation derivative matrices in y
    wy : Clenshaw-Curtis quadrature weights on y
    """

    def __init__(self, Lx: float, Nx: int, Ny: int):
        if not Lx > 0:
            raise ValueError(f"Lx must be positive, got {Lx}")
        if Nx < 8 or Nx % 2 != 0:
            raise ValueError(f"Nx must be even and >= 8, got {Nx}")
        if Ny < 9:
            raise ValueError(f"Ny must be >= 9, got {Ny}")
        self.Lx = float(Lx)
        self.Nx = int(Nx)
        self.Ny = int(Ny)
        self.x = self.Lx * np.arange(Nx) / Nx
        self.y = unit_nodes(Ny)
        self.Dy, self.Dy2 = unit_diff_matrices(Ny, 2)
        self.wy = unit_quad_weights(Ny)
        self.wx = self.Lx / Nx
        self.kx = 2.0 * np.pi * np.fft.rfftfreq(Nx, d=1.0 / Nx) / self.Lx
        # 2/3-rule cutoff: keep x modes with index <= Nx//3
        self.kx_keep = Nx // 3

    def __eq__(self, other):
        return (
            isinstance(other, ChannelGrid)
            and (self.Lx, self.Nx, self.Ny) == (other.Lx, other.Nx, other.Ny)
        )

    def __hash__(self):
        return hash((self.Lx, self.Nx, self.Ny))

    def __repr__(self):
        return f"ChannelGrid(Lx={self.Lx}, Nx={self.Nx}, Ny={self.Ny})"


def make_grid(Lx: float, Nx: int, Ny: int) -> ChannelGrid:
    """Build a channel grid, rejecting invalid geometry."""
    return ChannelGrid(Lx, Nx, Ny)


@dataclass
class ScalarField:
    grid: ChannelGrid
    values: np.ndarray  # (Ny, Nx)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.Ny, self.grid.Nx):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.Ny}, {self.grid.Nx})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")


@dataclass
class FlowField:
    """Velocity pair on a channel grid; t is optional snapshot metadata."""

    grid: ChannelGrid
    u1: ScalarField
    u2: ScalarField
    t: float | None = None

    def __post_init__(self):
        if self.u1.grid != self.grid or self.u2.grid != self.grid:
            raise ValueError("component grids disagree with the flow grid")

    @classmethod
    def from_arrays(cls, grid: ChannelGrid, u1, u2, t: float | None = None):
        return cls(grid, ScalarField(grid, u1), ScalarField(grid, u2), t=t)


def ddx(grid: ChannelGrid, values: np.ndarray) -> np.ndarray:
    """Spectral x-derivative along axis 1."""
    return np.fft.irfft(1j * grid.kx * np.fft.rfft(values, axis=1), n=grid.Nx, axis=1)


def ddy(grid: ChannelGrid, values: np.ndarray) -> np.ndarray:
    """Collocation y-derivative along axis 0."""
    return grid.Dy @ values


def laplacian(grid: ChannelGrid, values: np.ndarray) -> np.ndarray:
    vhat = np.fft.rfft(values, axis=1)
    d2x = np.fft.irfft(-(grid.kx**2) * vhat, n=grid.Nx, axis=1)
    return d2x + grid.Dy2 @ values


def integrate(f: ScalarField) -> float:
    """Double integral over the channel by the grid quadrature."""
    g = f.grid
    return float(g.wx * (g.wy @ f.values.sum(axis=1)))


def l2_norm(f: ScalarField | FlowField) -> float:
    """Unnormalized L2 norm; a FlowField sums both components under the root."""
    if isinstance(f, FlowField):
        g = f.grid
        sq = f.u1.values**2 + f.u2.values**2
        return float(np.sqrt(g.wx * (g.wy @ sq.sum(axis=1))))
    return float(np.sqrt(integrate(ScalarField(f.grid, f.values**2))))


def vorticity(u: FlowField) -> ScalarField:
    """Omega = d(u2)/dx - d(u1)/dy."""
    g = u.grid
    return ScalarField(g, ddx(g, u.u2.values) - ddy(g, u.u1.values))


def divergence(u: FlowField) -> ScalarField:
    g = u.grid
    return ScalarField(g, ddx(g, u.u1.values) + ddy(g, u.u2.values))


def divergence_residual(u: FlowField) -> float:
    """Max |div u| relative to the field scale (1 for velocities near O(1))."""
    scale = max(
        1.0,
        float(np.max(np.abs(u.u1.values))),
        float(np.max(np.abs(u.u2.values))),
    )
    return float(np.max(np.abs(divergence(u).values))) / scale


def zeros_like_grid(grid: ChannelGrid) -> FlowField:
    z = np.zeros((grid.Ny, grid.Nx))
    return FlowField.from_arrays(grid, z, z.copy())
