"""Acceptance suites: exact oracles, spectral controls, and reproduction bands.

Each criterion is a function returning a CriterionResult with the measured
numbers in `details`, so failures are diagnosable from the validate report.
Heavy simulation runs are memoized inside an AcceptanceLab so criteria that
share the reference ensemble (the n=1, R=1e4 pulse runs) reuse artifacts.

Stochastic criteria (random initial conditions) aggregate over the fixed
three-seed ensemble with medians, which is the operationalization used for
every per-cell band below.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .config import ExperimentConfig
from .diagnostics import NoPulseError, detect_first_pulse
from .fields import make_grid
from .shear import ShearProfile, drift_exit_time, drift_field, DriftState
from .solver import ChannelFlowSolver, SolverParams, simulate
from .spectra import (
    ProfileSample,
    admissible_alphas,
    orr_sommerfeld_spectrum,
    rayleigh_spectrum,
    scan_alpha,
)

PAPER_SEEDS = (101, 102, 103)
PULSE_HORIZONS = {
    (1, 10000): 60.0,
    (1, 20000): 45.0,
    (2, 10000): 30.0,
    (2, 20000): 35.0,
    (3, 10000): 25.0,
    (3, 20000): 30.0,
}
FIGURE_SNAPSHOT_TIMES = (0.0, 4.9, 14.9, 24.9)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: dict
    runtime_s: float

    def line(self) -> str:
        dets = ", ".join(f"{k}={_short(v)}" for k, v in self.details.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {dets}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], float):
        return "[" + ", ".join(f"{x:.4g}" for x in v) + "]"
    return v


def pulse_config(n: int, reynolds: float, seed: int) -> ExperimentConfig:
    """One cell of the reproduction matrix (c = 0.07, amplitude 0.01)."""
    snaps = FIGURE_SNAPSHOT_TIMES if (n, int(reynolds)) == (1, 10000) else ()
    return ExperimentConfig(
        run_name=f"matrix-n{n}-R{reynolds:g}-s{seed}",
        n=n,
        c=0.07,
        epsilon=1.0 / reynolds,
        Lx=2.0,
        Nx=128,
        Ny=129,
        horizon=PULSE_HORIZONS[(n, int(reynolds))],
        output_interval=0.1,
        snapshot_times=snaps,
        amplitude=0.01,
        seed=seed,
    )


class AcceptanceLab:
    """Criterion implementations with a shared, memoized run cache."""

    def __init__(self, progress=None):
        self._cache = {}
        self._progress = progress or (lambda msg: None)

    def run(self, cfg: ExperimentConfig):
        key = cfg.config_hash()
        if key not in self._cache:
            self._progress(f"    running {cfg.run_name} "
                           f"(horizon {cfg.horizon:g}) ...")
            self._cache[key] = simulate(cfg)
        return self._cache[key]

    def ensemble(self, n: int, reynolds: float):
        return [self.run(pulse_config(n, reynolds, s)) for s in PAPER_SEEDS]

    # -- criteria ------------------------------------------------------------

    def drift_oracle(self) -> CriterionResult:
        """Exact decay of the oscillatory shear at the stated resolution,
        plus step-halving and resolution-doubling convergence checks."""
        t0 = time.perf_counter()
        cfg = ExperimentConfig(
            run_name="drift-oracle", n=1, c=0.07, epsilon=1e-4, Lx=2.0,
            Nx=128, Ny=129, horizon=10.0, output_interval=0.5,
            snapshot_times=(10.0,), amplitude=0.0,
        )
        res = self.run(cfg)
        grid = make_grid(cfg.Lx, cfg.Nx, cfg.Ny)
        p = ShearProfile(cfg.c, cfg.n)

        def final_error(result):
            snap = result.snapshots[-1]
            g = snap.grid
            exact = drift_field(DriftState(p, cfg.epsilon, snap.t), g)
            return float(np.max(np.abs(snap.u1.values - exact.u1.values)))

        err_main = final_error(res)

        # the x dynamics is trivial for the pure shear, so the convergence
        # studies use a minimal x band to keep large fixed steps CFL-legal
        def study(Nx, Ny, dt):
            c2 = replace(cfg, run_name=f"drift-{Nx}-{Ny}-{dt}", Nx=Nx, Ny=Ny,
                         dt_mode="fixed", dt_value=dt, output_interval=2.5)
            return final_error(self.run(c2))

        err_dt = (study(8, 129, 0.2), study(8, 129, 0.1))
        dt_ratio = err_dt[0] / err_dt[1]
        err_ny = (study(8, 17, 0.05), study(8, 33, 0.05))
        ny_ratio = err_ny[0] / err_ny[1]

        passed = (err_main <= 1e-6) and (dt_ratio >= 3.0) and (ny_ratio >= 10.0)
        return CriterionResult(
            "drift-oracle", passed,
            {
                "max_err_t10": err_main,
                "tol": 1e-6,
                "dt_halving_ratio": float(dt_ratio),
                "ny_doubling_ratio": float(ny_ratio),
                "wall_s": res.wall_time_s,
            },
            time.perf_counter() - t0,
        )

    def couette_steady(self) -> CriterionResult:
        """The linear shear is an exact steady state of the viscous solver."""
        t0 = time.perf_counter()
        grid = make_grid(2.0, 64, 65)
        solver = ChannelFlowSolver(grid, SolverParams(epsilon=1e-4))
        state = solver.initial_state(profile=None, perturbation=None)
        from .diagnostics import deviation_from_linear

        worst = 0.0
        while state.t < 10.0 - 1e-12:
            state = solver.step(state)
            if state.step_count % 50 == 0:
                worst = max(worst, deviation_from_linear(solver.flow_field(state)))
        worst = max(worst, deviation_from_linear(solver.flow_field(state)))
        return CriterionResult(
            "couette-steady", worst <= 1e-10,
            {"max_deviation": worst, "tol": 1e-10, "t_final": state.t},
            time.perf_counter() - t0,
        )

    def euler_conservation(self) -> CriterionResult:
        """Energy and enstrophy invariance of the eps = 0 dynamics."""
        t0 = time.perf_counter()
        cfg = ExperimentConfig(
            run_name="euler-conservation", n=1, c=0.07, epsilon=0.0,
            Nx=128, Ny=129, horizon=5.0, output_interval=0.1,
            amplitude=0.01, seed=202,
        )
        res = self.run(cfg)
        E = res.series.channels["E"]
        G = res.series.channels["G"]
        e_drift = float(np.max(np.abs(E - E[0])) / E[0])
        g_drift = float(np.max(np.abs(G - G[0])) / G[0])
        return CriterionResult(
            "euler-conservation",
            res.status == "completed" and e_drift <= 1e-4 and g_drift <= 1e-4,
            {"E_rel_drift": e_drift, "G_rel_drift": g_drift, "tol": 1e-4},
            time.perf_counter() - t0,
        )

    def romanov_control(self) -> CriterionResult:
        """Couette viscous spectra are damped, with rates bounded by -C/R."""
        t0 = time.perf_counter()
        sample = ProfileSample.couette(129)
        cells = {}
        all_negative = True
        for R in (1e3, 1e4, 2e4):
            for alpha in (0.5, 1.0, 2.0):
                res = orr_sommerfeld_spectrum(sample, alpha, R, Ny=129)
                lead = res.max_growth()
                cells[(R, alpha)] = (lead, res.n_retained)
                if res.n_retained == 0 or not np.all(res.growth_rates < 0):
                    all_negative = False
        C = min(-lead * R for (R, _), (lead, _) in cells.items())
        bound_ok = all(
            lead <= -C / R + 1e-12 for (R, _), (lead, _) in cells.items()
        )
        passed = all_negative and C > 0 and bound_ok
        return CriterionResult(
            "romanov-control", passed,
            {
                "fitted_C": float(C),
                "leading_rates": [float(v[0]) for v in cells.values()],
                "retained_counts": [int(v[1]) for v in cells.values()],
            },
            time.perf_counter() - t0,
        )

    def instability_window(self) -> CriterionResult:
        """Inviscid instability of the c = 0.07 family at box wavenumbers,
        with growth rates uniform across n within a factor 1.5; the c = 0.03
        control below the window must show no growth above 1e-6."""
        t0 = time.perf_counter()
        alphas = admissible_alphas(2.0, 8)
        best = {}
        for n in (1, 2, 3):
            scan = scan_alpha(ProfileSample.from_shear(ShearProfile(0.07, n), 129),
                              alphas, Ny=129)
            best[n] = scan.max_growth()
        unstable_ok = all(v > 1e-6 for v in best.values())
        ratio = max(best.values()) / min(best.values())
        control = {}
        for n in (1, 2, 3):
            entries = scan_alpha(
                ProfileSample.from_shear(ShearProfile(0.03, n), 129),
                alphas, Ny=129,
            ).entries
            control[n] = max(
                (e.max_growth for e in entries
                 if e.error is None and np.isfinite(e.max_growth)),
                default=float("-inf"),
            )
        control_ok = all(v <= 1e-6 for v in control.values())
        passed = unstable_ok and (ratio <= 1.5) and control_ok
        return CriterionResult(
            "instability-window", passed,
            {
                "growth_by_n": [float(best[n]) for n in (1, 2, 3)],
                "spread_factor": float(ratio),
                "below_window_growth_by_n": [float(control[n]) for n in (1, 2, 3)],
                "control_ok": control_ok,
            },
            time.perf_counter() - t0,
        )

    def inviscid_limit(self) -> CriterionResult:
        """Viscous growth rates approach the inviscid one monotonically in R."""
        t0 = time.perf_counter()
        p = ShearProfile(0.07, 1)
        alpha = float(admissible_alphas(2.0, 1)[0])   # pi, the n=1 maximizer
        ray = rayleigh_spectrum(ProfileSample.from_shear(p, 201), alpha,
                                Ny=201).max_growth()
        plan = ((1e3, 129), (1e4, 161), (1e5, 257))
        gaps, rates = [], []
        for R, Ny in plan:
            sig = orr_sommerfeld_spectrum(
                ProfileSample.from_shear(p, Ny), alpha, R, Ny=Ny
            ).max_growth()
            rates.append(float(sig))
            gaps.append(abs(sig - ray))
        monotone = gaps[0] > gaps[1] > gaps[2]
        final_ok = gaps[2] <= 0.10 * abs(ray)
        return CriterionResult(
            "inviscid-limit", monotone and final_ok,
            {
                "rayleigh_rate": float(ray),
                "viscous_rates": rates,
                "gaps": [float(g) for g in gaps],
                "final_rel_gap": float(gaps[2] / abs(ray)),
            },
            time.perf_counter() - t0,
        )

    def pulse_timing(self) -> CriterionResult:
        """First-pulse duration in the moving frame tracks the drift-exit time."""
        t0 = time.perf_counter()
        T_unit = drift_exit_time(0.07, 1, 1e-4)
        unit_ok = 35.0 <= T_unit <= 36.0
        ends = []
        for res in self.ensemble(1, 1e4):
            rep = detect_first_pulse(res.series, "dev_drift")
            ends.append(rep.t_end if rep.t_end is not None else float("nan"))
        med = float(np.nanmedian(ends))
        band = (0.7 * 35.0, 1.3 * 35.0)
        med_ok = band[0] <= med <= band[1]
        return CriterionResult(
            "pulse-timing", unit_ok and med_ok,
            {
                "drift_exit_time": float(T_unit),
                "pulse_ends": [float(e) for e in ends],
                "median_end": med,
                "band": [float(b) for b in band],
            },
            time.perf_counter() - t0,
        )

    def sigma_band(self) -> CriterionResult:
        """Moving-frame growth rates per matrix cell, with R-robustness per n.

        The cross-R agreement statistic is pinned as |s1 - s2| <= 0.30 *
        max(s1, s2) (the two per-cell medians differ by at most 30% of the
        larger); the min- and mean-normalized variants are reported alongside
        since the drift-exit window halves from R = 1e4 to 2e4 and the n = 3
        cells sit near the boundary under every convention.
        """
        t0 = time.perf_counter()
        med = {}
        per_seed = {}
        for n in (1, 2, 3):
            for R in (1e4, 2e4):
                sigmas = []
                for res in self.ensemble(n, R):
                    try:
                        sigmas.append(
                            detect_first_pulse(res.series, "dev_drift").sigma
                        )
                    except NoPulseError:
                        sigmas.append(float("nan"))
                med[(n, R)] = float(np.nanmedian(sigmas))
                per_seed[(n, R)] = [float(s) for s in sigmas]
        in_band = all(0.05 <= v <= 0.25 for v in med.values())

        def spread(n, norm):
            a, b = med[(n, 1e4)], med[(n, 2e4)]
            return abs(a - b) / norm(a, b)

        spreads_max = {n: spread(n, lambda a, b: max(a, b)) for n in (1, 2, 3)}
        spread_ok = all(v <= 0.30 for v in spreads_max.values())
        return CriterionResult(
            "sigma-band", in_band and spread_ok,
            {
                "medians": [med[(n, R)] for n in (1, 2, 3) for R in (1e4, 2e4)],
                "band": [0.05, 0.25],
                "spreads_by_n": [float(spreads_max[n]) for n in (1, 2, 3)],
                "spreads_min_norm": [
                    float(spread(n, lambda a, b: min(a, b))) for n in (1, 2, 3)
                ],
                "spreads_mean_norm": [
                    float(spread(n, lambda a, b: (a + b) / 2)) for n in (1, 2, 3)
                ],
                "per_seed": {f"n{n}-R{R:g}": per_seed[(n, R)]
                             for n in (1, 2, 3) for R in (1e4, 2e4)},
            },
            time.perf_counter() - t0,
        )

    def enstrophy_modulation(self) -> CriterionResult:
        """Enstrophy decay-rate magnitude dominates the energy one ~100x.

        Known red: the converged physics of this configuration gives a
        median max|G_t| / max|E_t| of ~350 (the value changes by ~1% under a
        1.5x resolution increase, the rate channels match closed forms at
        t = 0 to 12 digits, and finite-difference dE/dt, dG/dt confirm them
        along the run), which exceeds the stated [30, 300] band.  At the
        initial shear alone the ratio is ~124; the transient pulse roughly
        triples it.  The band is asserted as stated rather than widened.
        """
        t0 = time.perf_counter()
        ratios = []
        for res in self.ensemble(1, 1e4):
            gt = np.max(np.abs(res.series.channels["G_t"]))
            et = np.max(np.abs(res.series.channels["E_t"]))
            ratios.append(float(gt / et))
        med = float(np.median(ratios))
        return CriterionResult(
            "enstrophy-modulation", 30.0 <= med <= 300.0,
            {"ratios": ratios, "median": med, "band": [30.0, 300.0]},
            time.perf_counter() - t0,
        )

    def dissipation_identity(self) -> CriterionResult:
        """Finite-difference dE/dt and dG/dt match the E_t, G_t channels
        during the first pulse (within 5% of the channel's peak there)."""
        t0 = time.perf_counter()
        res = self.run(pulse_config(1, 1e4, PAPER_SEEDS[0]))
        series = res.series
        rep = detect_first_pulse(series, "dev_drift")
        t_end = rep.t_end if rep.t_end is not None else rep.t_max + 10.0
        sel = (series.t >= rep.t_min) & (series.t <= t_end)
        idx = np.nonzero(sel)[0][1:-1]
        mismatches = {}
        for channel, name in (("E", "E_t"), ("G", "G_t")):
            vals = series.channels[channel]
            rate = series.channels[name]
            fd = (vals[idx + 1] - vals[idx - 1]) / (
                series.t[idx + 1] - series.t[idx - 1]
            )
            scale = np.max(np.abs(rate[idx]))
            mismatches[name] = float(np.max(np.abs(fd - rate[idx])) / scale)
        passed = all(v <= 0.05 for v in mismatches.values())
        return CriterionResult(
            "dissipation-identity", passed,
            {
                "E_t_rel_mismatch": mismatches["E_t"],
                "G_t_rel_mismatch": mismatches["G_t"],
                "tol": 0.05,
                "window": [float(rep.t_min), float(t_end)],
            },
            time.perf_counter() - t0,
        )

    def determinism(self) -> CriterionResult:
        """Identical config and seed reproduce the diagnostics CSV bitwise."""
        from .artifacts import write_diagnostics_csv
        import io as _io
        import tempfile
        from pathlib import Path

        t0 = time.perf_counter()
        cfg = ExperimentConfig(
            run_name="determinism", n=1, c=0.07, epsilon=1e-4,
            Nx=64, Ny=65, horizon=2.0, output_interval=0.1,
            amplitude=0.01, seed=7, jmax=8, kmax=8,
        )
        texts = []
        for _ in range(2):
            result = simulate(cfg)
            with tempfile.TemporaryDirectory() as d:
                path = Path(d) / "diag.csv"
                write_diagnostics_csv(path, result.series)
                texts.append(path.read_bytes())
        identical = texts[0] == texts[1]
        return CriterionResult(
            "determinism", identical,
            {"bytes": len(texts[0]), "identical": identical},
            time.perf_counter() - t0,
        )


CRITERIA = {
    "drift-oracle": AcceptanceLab.drift_oracle,
    "couette-steady": AcceptanceLab.couette_steady,
    "euler-conservation": AcceptanceLab.euler_conservation,
    "romanov-control": AcceptanceLab.romanov_control,
    "instability-window": AcceptanceLab.instability_window,
    "inviscid-limit": AcceptanceLab.inviscid_limit,
    "pulse-timing": AcceptanceLab.pulse_timing,
    "sigma-band": AcceptanceLab.sigma_band,
    "enstrophy-modulation": AcceptanceLab.enstrophy_modulation,
    "dissipation-identity": AcceptanceLab.dissipation_identity,
    "determinism": AcceptanceLab.determinism,
}

# fast, simulation-free checks useful for smoke-testing the validate path
UNIT_SUITES = {
    "unit-window": lambda lab: _unit_window(),
}


def _unit_window() -> CriterionResult:
    from .shear import in_instability_window

    t0 = time.perf_counter()
    T = drift_exit_time(0.07, 1, 1e-4)
    checks = {
        "window_c007": in_instability_window(0.07),
        "window_edge_closed": not in_instability_window(1 / (4 * math.pi)),
        "exit_time": 35.0 <= T <= 36.0,
    }
    return CriterionResult(
        "unit-window", all(checks.values()),
        {**checks, "T": float(T)}, time.perf_counter() - t0,
    )


def available_suites() -> list[str]:
    return list(CRITERIA) + list(UNIT_SUITES)


def run_acceptance(names=None, progress=None) -> list[CriterionResult]:
    """Run the selected (or all) acceptance criteria; prints one line each."""
    say = progress or print
    lab = AcceptanceLab(progress=say)
    selected = names or list(CRITERIA)
    results = []
    for name in selected:
        if name in CRITERIA:
            fn = CRITERIA[name]
            say(f"-- {name}")
            result = fn(lab)
        elif name in UNIT_SUITES:
            say(f"-- {name}")
            result = UNIT_SUITES[name](lab)
        else:
            raise KeyError(
                f"unknown suite {name!r}; available: {', '.join(available_suites())}"
            )
        say(result.line())
        results.append(result)
    return results
