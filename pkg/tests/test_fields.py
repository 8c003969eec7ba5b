"""Grid construction, operators, quadrature, and norm contracts."""

import numpy as np
import pytest

from shearlab.fields import (
    DIV_TOL,
    FlowField,
    ScalarField,
    ddx,
    ddy,
    divergence,
    divergence_residual,
    integrate,
    l2_norm,
    make_grid,
    vorticity,
)


@pytest.fixture(scope="module")
def grid():
    return make_grid(2.0, 64, 65)


class TestMakeGrid:
    def test_basic_construction(self):
        g = make_grid(2.0, 64, 65)
        assert g.y[0] == 0.0 and g.y[-1] == 1.0
        assert g.x[0] == 0.0 and g.x[-1] < g.Lx

    def test_two_pi_box(self):
        g = make_grid(2 * np.pi, 128, 129)
        assert g.Nx == 128 and g.Ny == 129

    @pytest.mark.parametrize(
        "args", [(-1.0, 64, 65), (0.0, 64, 65), (2.0, 63, 65), (2.0, 4, 65), (2.0, 64, 7)]
    )
    def test_rejects_bad_geometry(self, args):
        with pytest.raises(ValueError):
            make_grid(*args)


class TestNormsAndIntegrals:
    def test_zero_field(self, grid):
        f = ScalarField(grid, np.zeros((grid.Ny, grid.Nx)))
        assert l2_norm(f) == 0.0

    def test_sin_norm_is_one_on_lx2(self, grid):
        # int_0^1 sin^2(4 pi y) dy = 1/2, times Lx = 2 -> norm 1
        f = ScalarField(grid, np.tile(np.sin(4 * np.pi * grid.y)[:, None], (1, grid.Nx)))
        assert abs(l2_norm(f) - 1.0) < 1e-12

    def test_couette_norm(self, grid):
        # int_0^1 y^2 dy = 1/3 -> sqrt(2/3)
        u = FlowField.from_arrays(
            grid, np.tile(grid.y[:, None], (1, grid.Nx)), np.zeros((grid.Ny, grid.Nx))
        )
        assert abs(l2_norm(u) - np.sqrt(2.0 / 3.0)) < 1e-12

    def test_integrate_constant(self, grid):
        f = ScalarField(grid, np.ones((grid.Ny, grid.Nx)))
        assert abs(integrate(f) - 2.0) < 1e-13

    def test_integrate_y_squared(self, grid):
        f = ScalarField(grid, np.tile((grid.y**2)[:, None], (1, grid.Nx)))
        assert abs(integrate(f) - 2.0 / 3.0) < 1e-13

    def test_integrate_full_periods(self, grid):
        f = ScalarField(grid, np.tile(np.cos(4 * np.pi * grid.y)[:, None], (1, grid.Nx)))
        assert abs(integrate(f)) < 1e-12

    def test_norm_squared_equals_integral_of_square(self, grid):
        rng = np.random.default_rng(0)
        for _ in range(5):
            a = rng.normal(size=4)
            vals = (
                a[0] * np.sin(2 * np.pi * grid.x / grid.Lx)[None, :]
                * np.sin(np.pi * grid.y)[:, None]
                + a[1] * np.cos(4 * np.pi * grid.x / grid.Lx)[None, :]
                + a[2] * grid.y[:, None] ** 3
                + a[3]
            )
            f = ScalarField(grid, vals)
            lhs = l2_norm(f) ** 2
            rhs = integrate(ScalarField(grid, vals**2))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestDifferentialOperators:
    def test_vorticity_of_couette(self, grid):
        u = FlowField.from_arrays(
            grid, np.tile(grid.y[:, None], (1, grid.Nx)), np.zeros((grid.Ny, grid.Nx))
        )
        assert np.allclose(vorticity(u).values, -1.0, atol=1e-10)

    def test_vorticity_of_oscillatory_shear(self, grid):
        c, n = 0.07, 1
        u1 = np.tile((grid.y + c / n * np.sin(4 * n * np.pi * grid.y))[:, None], (1, grid.Nx))
        u = FlowField.from_arrays(grid, u1, np.zeros((grid.Ny, grid.Nx)))
        expect = -1.0 - 4 * np.pi * c * np.cos(4 * n * np.pi * grid.y)
        assert np.allclose(vorticity(u).values, expect[:, None], atol=1e-8)

    def test_vorticity_of_rest(self, grid):
        u = FlowField.from_arrays(grid, np.zeros((grid.Ny, grid.Nx)), np.zeros((grid.Ny, grid.Nx)))
        assert np.all(vorticity(u).values == 0.0)

    def test_divergence_of_shear_is_zero(self, grid):
        u1 = np.tile(np.tanh(grid.y)[:, None], (1, grid.Nx))
        u = FlowField.from_arrays(grid, u1, np.zeros((grid.Ny, grid.Nx)))
        assert np.max(np.abs(divergence(u).values)) < 1e-12

    def test_divergence_of_streamfunction_curl(self, grid):
        # u = (dpsi/dy, -dpsi/dx) is solenoidal for any smooth psi
        X = grid.x[None, :]
        Y = grid.y[:, None]
        psi = np.sin(2 * np.pi * X / grid.Lx) * (np.sin(np.pi * Y) * np.sin(3 * np.pi * Y))
        u = FlowField.from_arrays(grid, ddy(grid, psi), -ddx(grid, psi))
        assert divergence_residual(u) < DIV_TOL

    def test_divergence_of_nonsolenoidal(self, grid):
        u1 = np.tile(np.sin(2 * np.pi * grid.x / grid.Lx)[None, :] * (2 * np.pi / grid.Lx) ** -1,
                     (grid.Ny, 1))
        # d/dx of sin(kx)/k is cos(kx)
        u = FlowField.from_arrays(grid, u1, np.zeros((grid.Ny, grid.Nx)))
        expect = np.cos(2 * np.pi * grid.x / grid.Lx)
        assert np.allclose(divergence(u).values, expect[None, :], atol=1e-12)

    def test_operators_linear(self, grid):
        rng = np.random.default_rng(1)
        X, Y = grid.x[None, :], grid.y[:, None]
        f1 = np.sin(2 * np.pi * X / grid.Lx) * Y**2
        f2 = np.cos(4 * np.pi * X / grid.Lx) * np.sin(np.pi * Y)
        g1 = np.cos(2 * np.pi * X / grid.Lx) * (1 - Y)
        g2 = Y**3 * np.sin(4 * np.pi * X / grid.Lx)
        a, b = rng.normal(size=2)
        ua = FlowField.from_arrays(grid, f1, f2)
        ub = FlowField.from_arrays(grid, g1, g2)
        uc = FlowField.from_arrays(grid, a * f1 + b * g1, a * f2 + b * g2)
        for op in (vorticity, divergence):
            lhs = op(uc).values
            rhs = a * op(ua).values + b * op(ub).values
            assert np.allclose(lhs, rhs, atol=1e-11)

    def test_rejects_nonfinite(self, grid):
        vals = np.zeros((grid.Ny, grid.Nx))
        vals[3, 4] = np.nan
        with pytest.raises(ValueError, match="finite"):
            ScalarField(grid, vals)
