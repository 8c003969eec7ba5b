"""Semi-implicit pseudospectral integrator for the 2D channel equations.

Formulation
-----------
The state is the perturbation about the Couette base flow: u = (y + v1, v2).
The perturbation carries all dynamics in streamfunction-vorticity form,

    w_t + (y + v1) w_x + v2 w_y = eps lap(w),      w = -lap(psi),
    v1 = psi_y,  v2 = -psi_x,

with Fourier modes in x and Chebyshev collocation in y.  The constant base
vorticity drops out of the advection, so w is the full perturbation
vorticity.  Incompressibility is exact by construction (the x derivative is
diagonal per mode and commutes with the y collocation derivative).

Real differentiation matrices are applied to complex mode arrays through a
float view (the interleaved re/im columns), which keeps the products in real
BLAS; the per-stage Helmholtz solves use precomputed dense inverses applied
as one batched matmul over the modes.

The x-mean mode is evolved in momentum form,

    vbar_t + d/dy <v1 v2> = eps vbar_yy,

because the no-slip condition constrains the mean velocity, not the mean
vorticity.  Viscous wall conditions are v1 = v2 = 0 (the base already meets
the moving-wall data); at eps = 0 only non-penetration v2 = 0 survives and
slip is free.

Time stepping
-------------
Three-stage Runge-Kutta with explicit advection and per-stage implicit
(Crank-Nicolson-like) diffusion, the standard low-storage scheme for channel
DNS.  Each viscous stage solves a fourth-order problem in psi per mode,

    (-L + eps b_s dt L^2) psi = rhs,      L = D2 - alpha^2,

with the four boundary rows (psi and psi' at both walls) replacing the rows
nearest the walls; the per-mode systems are pre-inverted per stage and
reused until dt changes.  Advection is stable up to |u| alpha_max dt <
sqrt(3); products are dealiased by the 2/3 rule in x and by
Chebyshev-coefficient truncation of the advection term in y.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft
import scipy.linalg

from .diagnostics import (
    DiagnosticSeries,
    deviation_from_drift,
    deviation_from_linear,
    energy,
    energy_rate,
    enstrophy,
    enstrophy_rate,
)
from .fields import ChannelGrid, FlowField, make_grid
from .shear import DriftState, ShearProfile

RK_GAMMA = (8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0)
RK_ZETA = (0.0, -17.0 / 60.0, -5.0 / 12.0)
RK_IMPLICIT = tuple((g + z) / 2.0 for g, z in zip(RK_GAMMA, RK_ZETA))
CFL_HARD_LIMIT = math.sqrt(3.0)

BC_RESIDUAL_TOL = 1e-12


class CflError(RuntimeError):
    def __init__(self, theta: float, suggested_dt: float):
        super().__init__(
            f"advective CFL violated (theta = {theta:.3f} > {CFL_HARD_LIMIT:.3f}); "
            f"suggested dt <= {suggested_dt:.3e}"
        )
        self.suggested_dt = suggested_dt


class BlowUpError(RuntimeError):
    pass


@dataclass(frozen=True)
class PerturbationSpec:
    """Reproducible random solenoidal perturbation.

    The perturbation streamfunction is a band of Fourier-in-x modes with
    wall-compatible y shapes sin(pi y) sin(k pi y) (so both velocity
    components vanish at the walls), coefficient moduli
    (1 + j^2 + k^2)^(-decay/2), and seeded random phases; the velocity is its
    curl, rescaled to the requested L2 norm.
    """

    amplitude: float
    seed: int
    jmax: int = 8
    kmax: int = 8
    decay: float = 2.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if self.amplitude > 0 and (self.jmax < 1 or self.kmax < 1):
            raise ValueError("perturbation band is empty")


@dataclass(frozen=True)
class SolverParams:
    epsilon: float
    dt: float | None = None        # fixed step when set; CFL-adaptive otherwise
    cfl_safety: float = 0.5
    dt_max: float = 0.05
    dealias: bool = True
    bc_mode: str = "auto"          # auto | viscous | inviscid

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.bc_mode not in ("auto", "viscous", "inviscid"):
            raise ValueError(f"unknown bc_mode {self.bc_mode!r}")
        if self.bc_mode == "viscous" and self.epsilon == 0.0:
            raise ValueError("viscous wall conditions require epsilon > 0")
        if self.bc_mode == "inviscid" and self.epsilon > 0.0:
            raise ValueError("epsilon > 0 runs use the viscous wall conditions")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must be in (0, 1]")

    @property
    def viscous(self) -> bool:
        return self.epsilon > 0.0


@dataclass
class SolverState:
    """Perturbation state: per-mode streamfunction columns plus the x-mean.

    omh carries the perturbation vorticity modes.  Under viscous walls it is
    slaved to psik; at eps = 0 its wall rows are dynamical (advected) and
    must persist between steps.
    """

    t: float
    dt: float
    step_count: int
    psik: np.ndarray   # (Ny, Nx//2+1) complex, column 0 unused
    vbar: np.ndarray   # (Ny,) mean of v1
    omh: np.ndarray    # (Ny, Nx//2+1) complex, column 0 = mean vorticity
    bc_residual: float = 0.0


def _perturbation_parts(spec: PerturbationSpec, g: ChannelGrid):
    """Unscaled streamfunction and analytic velocity of the random band."""
    rng = np.random.default_rng(spec.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(spec.jmax, spec.kmax))
    X = g.x[None, :]
    Y = g.y[:, None]
    psi = np.zeros((g.Ny, g.Nx))
    u1 = np.zeros((g.Ny, g.Nx))
    u2 = np.zeros((g.Ny, g.Nx))
    sin_pi = np.sin(np.pi * Y)
    cos_pi = np.cos(np.pi * Y)
    for j in range(1, spec.jmax + 1):
        alpha = 2.0 * np.pi * j / g.Lx
        for k in range(1, spec.kmax + 1):
            mod = (1.0 + j * j + k * k) ** (-spec.decay / 2.0)
            carrier = np.cos(alpha * X + phases[j - 1, k - 1])
            dcarrier = -alpha * np.sin(alpha * X + phases[j - 1, k - 1])
            shape = sin_pi * np.sin(k * np.pi * Y)
            dshape = (np.pi * cos_pi * np.sin(k * np.pi * Y)
                      + k * np.pi * sin_pi * np.cos(k * np.pi * Y))
            psi += mod * carrier * shape
            u1 += mod * carrier * dshape        # d(psi)/dy
            u2 -= mod * dcarrier * shape        # -d(psi)/dx
    return psi, u1, u2


def random_perturbation(spec: PerturbationSpec, g: ChannelGrid) -> FlowField:
    """Divergence-free field with both velocity components zero at the walls,
    L2 norm equal to spec.amplitude, deterministic in the seed."""
    _, u = _scaled_perturbation(spec, g)
    return u


def _scaled_perturbation(spec: PerturbationSpec, g: ChannelGrid):
    from .fields import l2_norm

    if spec.amplitude == 0.0:
        z = np.zeros((g.Ny, g.Nx))
        return z, FlowField.from_arrays(g, z, z.copy())
    if spec.jmax > g.Nx // 3:
        raise ValueError(
            f"x band jmax={spec.jmax} exceeds the dealiased resolution {g.Nx // 3}"
        )
    if spec.kmax > g.Ny // 3:
        raise ValueError(
            f"y band kmax={spec.kmax} exceeds the wall-normal resolution {g.Ny // 3}"
        )
    psi, u1, u2 = _perturbation_parts(spec, g)
    raw = l2_norm(FlowField.from_arrays(g, u1, u2))
    s = spec.amplitude / raw
    return s * psi, FlowField.from_arrays(g, s * u1, s * u2)


def _rmat(M: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Real matrix times complex array via the interleaved float view."""
    if not Z.flags.c_contiguous:
        Z = np.ascontiguousarray(Z)
    out = M @ Z.view(np.float64).reshape(Z.shape[0], -1)
    return out.view(np.complex128)


class ChannelFlowSolver:
    """Integrator bound to one grid and one parameter set.

    Factorizations are cached per time step; results are pure functions of
    the input state, so a solver instance may be reused across runs with the
    same grid/params but must not be shared across threads mid-step.
    """

    def __init__(self, grid: ChannelGrid, params: SolverParams):
        self.grid = grid
        self.params = params
        Nx, Ny = grid.Nx, grid.Ny
        self.jcut = Nx // 3 if params.dealias else Nx // 2 - 1
        self.active = np.arange(1, self.jcut + 1)
        self.alphas = grid.kx[self.active]
        self.alpha_max = float(self.alphas[-1])
        self.Dy = grid.Dy
        self.Dy2 = grid.Dy2
        # local node spacing for the wall-normal CFL estimate
        dy = np.diff(grid.y)
        self.dy_local = np.minimum(np.r_[dy, dy[-1]], np.r_[dy[0], dy])
        # per-mode Helmholtz operators L_k = D2 - alpha^2 and their squares
        eye = np.eye(Ny)
        self.L = np.stack([self.Dy2 - a * a * eye for a in self.alphas])
        self.L2 = np.stack([Lk @ Lk for Lk in self.L]) if params.viscous else None
        self._bc_rows = (
            (0, eye[0]),
            (1, self.Dy[0]),
            (Ny - 2, self.Dy[Ny - 1]),
            (Ny - 1, eye[Ny - 1]),
        )
        self._stage_ops = None     # (dt, [3 batched inverses], [3 mean LU])
        self._poisson_inv = None
        if not params.viscous:
            self._poisson_inv = np.stack(
                [np.linalg.inv(Lk[1:-1, 1:-1]) for Lk in self.L]
            )
        self.y_col = grid.y[:, None]
        self._ycheb_cut = 2 * (Ny - 1) // 3

    # -- factorizations -----------------------------------------------------

    def _factor_for_dt(self, dt: float):
        if self._stage_ops is not None and self._stage_ops[0] == dt:
            return
        Ny = self.grid.Ny
        eye = np.eye(Ny)
        stage_inv, mean_lu = [], []
        for b in RK_IMPLICIT:
            coef = self.params.epsilon * b * dt
            M = -self.L + coef * self.L2
            for r, row in self._bc_rows:
                M[:, r, :] = row
            stage_inv.append(np.linalg.inv(M))
            M0 = eye - coef * self.Dy2
            M0[0] = eye[0]
            M0[-1] = eye[-1]
            mean_lu.append(scipy.linalg.lu_factor(M0))
        self._stage_ops = (dt, stage_inv, mean_lu)

    @staticmethod
    def _batched_solve(inv: np.ndarray, rhs_cols: np.ndarray) -> np.ndarray:
        """Apply per-mode inverses to complex columns (rows, n_modes)."""
        n = rhs_cols.shape[1]
        r = np.ascontiguousarray(rhs_cols.T).view(np.float64).reshape(n, -1, 2)
        out = np.matmul(inv, r)                      # (n, rows, 2)
        return np.ascontiguousarray(out.view(np.complex128)[..., 0].T)

    # -- initial conditions --------------------------------------------------

    def initial_state(self, profile: ShearProfile | None = None,
                      perturbation: PerturbationSpec | None = None,
                      dt: float | None = None) -> SolverState:
        g = self.grid
        vbar = np.zeros(g.Ny)
        if profile is not None:
            vbar = (profile.c / profile.n) * np.sin(profile.wavenumber * g.y)
        psik = np.zeros((g.Ny, g.Nx // 2 + 1), dtype=complex)
        if perturbation is not None and perturbation.amplitude > 0:
            if perturbation.jmax > self.jcut:
                raise ValueError(
                    f"perturbation band jmax={perturbation.jmax} exceeds the "
                    f"active mode cutoff {self.jcut}"
                )
            psi, _ = _scaled_perturbation(perturbation, g)
            psik = np.fft.rfft(psi, axis=1)
            psik[:, self.jcut + 1:] = 0.0
        omh = self._vorticity_hat(psik, vbar)
        if dt is None:
            dt = self.params.dt
        if dt is None:
            _, _, speed = self._advection(psik, vbar, omh)
            dt = min(self.params.dt_max,
                     self.params.cfl_safety * CFL_HARD_LIMIT / speed)
        return SolverState(t=0.0, dt=float(dt), step_count=0, psik=psik,
                           vbar=vbar, omh=omh)

    # -- core operators -------------------------------------------------------

    def _velocities_hat(self, psik, vbar):
        # the x-mean lives in the DC column with the rfft scaling (irfft
        # divides by Nx)
        v1h = _rmat(self.Dy, psik)
        v1h[:, 0] = self.grid.Nx * vbar
        v2h = -1j * self.grid.kx * psik
        v2h[:, 0] = 0.0
        return v1h, v2h

    def _vorticity_hat(self, psik, vbar):
        omh = -(_rmat(self.Dy2, psik) - self.grid.kx**2 * psik)
        omh[:, 0] = -self.grid.Nx * (self.Dy @ vbar)
        return omh

    def _advection(self, psik, vbar, omh, want_speed: bool = True):
        """Advection transform, mean forcing, and the CFL speed estimate."""
        g = self.grid
        v1h, v2h = self._velocities_hat(psik, vbar)
        stacked = np.vstack((v1h, v2h, omh, 1j * g.kx * omh))
        phys = np.fft.irfft(stacked, n=g.Nx, axis=1)
        v1, v2, om, omx = np.split(phys, 4, axis=0)
        omy = self.Dy @ om
        u1 = self.y_col + v1
        adv = u1 * omx + v2 * omy
        ahat = np.fft.rfft(adv, axis=1)
        ahat[:, 0] = 0.0
        ahat[:, self.jcut + 1:] = 0.0
        if self.params.dealias:
            cols = np.ascontiguousarray(ahat[:, self.active])
            coeffs = scipy.fft.dct(cols, type=1, axis=0)
            coeffs[self._ycheb_cut:] = 0.0
            ahat[:, self.active] = scipy.fft.idct(coeffs, type=1, axis=0)
        fbar = self.Dy @ (v1 * v2).mean(axis=1)
        speed = None
        if want_speed:
            speed = float(
                np.max(np.abs(u1) * self.alpha_max
                       + np.abs(v2) * (np.pi / self.dy_local[:, None]))
            )
        return ahat, fbar, speed

    def _stage(self, s, dt, psik, vbar, omh, ahat, fbar, ahat_prev, fbar_prev):
        gam, zet, b = RK_GAMMA[s], RK_ZETA[s], RK_IMPLICIT[s]
        eps = self.params.epsilon
        a_idx = self.active
        om_a = omh[:, a_idx]
        explicit = -gam * ahat[:, a_idx]
        if zet != 0.0:
            explicit = explicit - zet * ahat_prev[:, a_idx]
        psik_new = np.zeros_like(psik)
        omh_new = np.zeros_like(psik)
        if self.params.viscous:
            lom = _rmat(self.Dy2, om_a) - self.alphas**2 * om_a
            rhs = om_a + dt * (eps * b * lom + explicit)
            for r, _ in self._bc_rows:
                rhs[r] = 0.0
            psi_a = self._batched_solve(self._stage_ops[1][s], rhs)
            psik_new[:, a_idx] = psi_a
            # vorticity is slaved to the streamfunction solve
            omh_new[:, a_idx] = -(_rmat(self.Dy2, psi_a) - self.alphas**2 * psi_a)
        else:
            om_new = om_a + dt * explicit
            psi_a = np.zeros((self.grid.Ny, a_idx.size), dtype=complex)
            psi_a[1:-1] = self._batched_solve(self._poisson_inv, -om_new[1:-1])
            psik_new[:, a_idx] = psi_a
            # wall vorticity rows are advected, not slaved to psi
            omh_new[:, a_idx] = om_new
        # mean mode in momentum form
        rbar = vbar + dt * (eps * b * (self.Dy2 @ vbar) - gam * fbar
                            - (zet * fbar_prev if zet != 0.0 else 0.0))
        if self.params.viscous:
            rbar[0] = 0.0
            rbar[-1] = 0.0
            vbar_new = scipy.linalg.lu_solve(self._stage_ops[2][s], rbar,
                                             check_finite=False)
        else:
            vbar_new = rbar
        omh_new[:, 0] = -self.grid.Nx * (self.Dy @ vbar_new)
        return psik_new, vbar_new, omh_new

    def step(self, state: SolverState) -> SolverState:
        """Advance one time step; raises on CFL violation or blow-up."""
        dt = state.dt
        if self.params.viscous:
            self._factor_for_dt(dt)
        psik, vbar, omh = state.psik, state.vbar, state.omh
        ahat_prev = np.zeros_like(psik)
        fbar_prev = np.zeros_like(vbar)
        for s in range(3):
            ahat, fbar, speed = self._advection(psik, vbar, omh, want_speed=(s == 0))
            if s == 0:
                theta = dt * speed
                if theta > CFL_HARD_LIMIT:
                    raise CflError(
                        theta,
                        self.params.cfl_safety * CFL_HARD_LIMIT / speed,
                    )
            psik, vbar, omh = self._stage(
                s, dt, psik, vbar, omh, ahat, fbar, ahat_prev, fbar_prev
            )
            ahat_prev, fbar_prev = ahat, fbar
        if not (np.all(np.isfinite(vbar)) and np.all(np.isfinite(psik.view(float)))):
            raise BlowUpError(f"non-finite state after step {state.step_count + 1}")
        return SolverState(
            t=state.t + dt,
            dt=dt,
            step_count=state.step_count + 1,
            psik=psik,
            vbar=vbar,
            omh=omh,
            bc_residual=max(state.bc_residual, self._bc_residual(psik, vbar)),
        )

    def _bc_residual(self, psik, vbar) -> float:
        g = self.grid
        walls = np.abs(np.fft.irfft(psik[[0, -1]], n=g.Nx, axis=1)).max()
        u2_res = walls * self.alpha_max
        if not self.params.viscous:
            return float(u2_res)
        v1w = self.Dy[[0, -1]] @ psik
        v1w[:, 0] += g.Nx * vbar[[0, -1]]
        v1_res = np.abs(np.fft.irfft(v1w, n=g.Nx, axis=1)).max()
        return float(max(u2_res, v1_res))

    def cfl_dt(self, state: SolverState) -> float:
        """Largest stable step at the configured safety factor."""
        _, _, speed = self._advection(state.psik, state.vbar, state.omh)
        return self.params.cfl_safety * CFL_HARD_LIMIT / speed

    def flow_field(self, state: SolverState) -> FlowField:
        g = self.grid
        v1h, v2h = self._velocities_hat(state.psik, state.vbar)
        u1 = self.y_col + np.fft.irfft(v1h, n=g.Nx, axis=1)
        u2 = np.fft.irfft(v2h, n=g.Nx, axis=1)
        return FlowField.from_arrays(g, u1, u2, t=state.t)


@dataclass
class RunResult:
    """In-memory artifacts of one run: sampled channels and snapshots."""

    config: object
    series: DiagnosticSeries
    snapshots: list[FlowField]
    status: str                    # completed | failed
    error: str | None
    n_steps: int
    final_dt: float
    max_bc_residual: float
    wall_time_s: float


def _solver_params(config) -> SolverParams:
    return SolverParams(
        epsilon=config.epsilon,
        dt=config.dt_value if config.dt_mode == "fixed" else None,
        cfl_safety=config.cfl_safety,
        dt_max=config.dt_max,
        dealias=config.dealias,
        bc_mode=config.bc_mode,
    )


def simulate(config) -> RunResult:
    """Integrate one experiment: oscillatory shear plus seeded perturbation.

    Samples all diagnostic channels every output interval and captures
    snapshots at the first sample at or after each requested time.  In the
    CFL-adaptive mode the step is requantized once per interval so samples
    land exactly on multiples of the output interval; in fixed-dt mode
    samples land on the first step boundary at or past each interval.
    Failures flush the partial series with a failure status instead of
    raising.
    """
    t_start = time.perf_counter()
    grid = make_grid(config.Lx, config.Nx, config.Ny)
    params = _solver_params(config)
    solver = ChannelFlowSolver(grid, params)
    profile = ShearProfile(config.c, config.n)
    pert = None
    if config.amplitude > 0:
        pert = PerturbationSpec(
            amplitude=config.amplitude, seed=config.seed,
            jmax=config.jmax, kmax=config.kmax, decay=config.decay,
        )
    state = solver.initial_state(profile, pert)

    dt_out = config.output_interval
    n_out = int(round(config.horizon / dt_out + 1e-9))
    snap_queue = sorted(set(float(ts) for ts in config.snapshot_times))

    stamps: list[float] = []
    data: dict[str, list[float]] = {name: [] for name in
                                    ("dev_linear", "dev_drift", "E", "G", "E_t", "G_t")}
    snapshots: list[FlowField] = []

    def sample(st: SolverState):
        u = solver.flow_field(st)
        drift = DriftState(profile, config.epsilon, st.t)
        stamps.append(st.t)
        data["dev_linear"].append(deviation_from_linear(u))
        data["dev_drift"].append(deviation_from_drift(u, drift))
        data["E"].append(energy(u))
        data["G"].append(enstrophy(u))
        data["E_t"].append(energy_rate(u, config.epsilon))
        data["G_t"].append(enstrophy_rate(u, config.epsilon))
        while snap_queue and st.t >= snap_queue[0] - 1e-9:
            snap_queue.pop(0)
            snapshots.append(u)

    status, error = "completed", None
    steps_per_interval = None
    try:
        sample(state)
        for k in range(1, n_out + 1):
            t_target = k * dt_out
            if config.dt_mode == "fixed":
                dt = config.dt_value
                m = max(1, math.ceil(round((t_target - state.t) / dt, 9)))
            else:
                limit = min(solver.cfl_dt(state), params.dt_max, dt_out)
                m_needed = max(1, math.ceil(round(dt_out / limit, 9)))
                if steps_per_interval is None or m_needed > steps_per_interval:
                    steps_per_interval = m_needed
                elif m_needed < steps_per_interval * 0.7:
                    # hysteresis: grow the step only when there is clear room
                    steps_per_interval = m_needed
                m = steps_per_interval
                dt = dt_out / m
            state = replace(state, dt=float(dt))
            for _ in range(m):
                state = solver.step(state)
            if config.dt_mode != "fixed":
                # kill float accumulation so stamps are exact multiples
                state = replace(state, t=t_target)
            sample(state)
    except (CflError, BlowUpError, FloatingPointError) as exc:
        status, error = "failed", str(exc)

    series = DiagnosticSeries(
        t=np.asarray(stamps),
        channels={k: np.asarray(v) for k, v in data.items()},
        sample_interval=dt_out,
    )
    return RunResult(
        config=config,
        series=series,
        snapshots=snapshots,
        status=status,
        error=error,
        n_steps=state.step_count,
        final_dt=state.dt,
        max_bc_residual=state.bc_residual,
        wall_time_s=time.perf_counter() - t_start,
    )
