"""Figure kit for shearlab run artifacts."""

from .figures import (
    FIGURE_KINDS,
    FigureError,
    plot_deviation_series,
    plot_drift_deviation_series,
    plot_energy_enstrophy,
    plot_snapshots,
    render,
)
from .io import list_snapshots, read_pulse, read_series, read_snapshot

__version__ = "0.1.0"
