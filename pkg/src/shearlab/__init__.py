"""2D channel-flow laboratory: oscillatory shears near Couette flow.

Simulates the incompressible channel equations seeded with the oscillatory
shear family, measures transient-growth diagnostics, and verifies the
family's linear (in)stability with Rayleigh and Orr-Sommerfeld spectra.
"""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .diagnostics import (
    DiagnosticSeries,
    PulseReport,
    detect_first_pulse,
    deviation_from_drift,
    deviation_from_linear,
    energy,
    energy_rate,
    enstrophy,
    enstrophy_rate,
    growth_rate,
)
from .fields import (
    ChannelGrid,
    FlowField,
    ScalarField,
    divergence,
    integrate,
    l2_norm,
    make_grid,
    vorticity,
)
from .shear import (
    DriftState,
    ShearProfile,
    couette_field,
    drift_exit_time,
    drift_field,
    in_instability_window,
    shear_field,
    velocity_deviation_norm,
    vorticity_deviation_norm,
)
from .solver import (
    ChannelFlowSolver,
    PerturbationSpec,
    RunResult,
    SolverParams,
    SolverState,
    random_perturbation,
    simulate,
)
from .spectra import (
    ProfileSample,
    SpectrumResult,
    admissible_alphas,
    filter_spurious,
    orr_sommerfeld_spectrum,
    rayleigh_spectrum,
    scan_alpha,
)

__version__ = "0.1.0"
