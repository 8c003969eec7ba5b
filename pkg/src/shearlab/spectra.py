"""Temporal stability spectra of wall-bounded shear profiles.

Two eigenproblems for normal modes psi' = phi(y) exp(i alpha (x - c t)):

  inviscid (Rayleigh):   (U - c)(phi'' - a^2 phi) = U'' phi,
                         phi(0) = phi(1) = 0;
  viscous (Orr-Sommerfeld):
      (U - c)(phi'' - a^2 phi) - U'' phi
          = (i a R)^-1 (phi'''' - 2 a^2 phi'' + a^4 phi),
      phi = phi' = 0 at both walls.

Both are discretized by Chebyshev collocation on [0, 1] and solved as dense
generalized eigenproblems (no inversion of the mass operator, so modes that
belong at infinity stay there).  Rayleigh imposes the Dirichlet conditions by
interior-node reduction; the viscous problem keeps the full node set and
replaces the two rows nearest each wall by the four clamped conditions, with
the corresponding mass rows zeroed.

Discrete spectra of these operators are polluted by remnants of the
continuous spectrum and by roundoff modes, so every public solve is run at
two resolutions (Ny and 2*Ny - 1, whose node sets nest) and only eigenvalues
that both persist across the pair and certify a small operator residual are
reported.  The temporal growth rate convention is sigma = alpha * Im(c)
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .chebyshev import unit_diff_matrices, unit_interp, unit_nodes
from .shear import ShearProfile

DEFAULT_FILTER_TOL = 1e-6
# roundoff in the collocation fourth derivative moves even well-converged
# viscous eigenvalues by up to ~2e-5 at the doubled resolutions (measured at
# Ny = 257), while genuine mode spacings are ~1e-2; the viscous persistence
# tolerance sits between those scales
DEFAULT_OS_FILTER_TOL = 1e-4
DEFAULT_RESIDUAL_TOL = 1e-8


class SpectrumError(RuntimeError):
    """Raised when an eigenvalue solve cannot be carried out."""


@dataclass
class ProfileSample:
    """A base profile U(y) sampled on CGL nodes, with U'' alongside.

    Carries an optional generator so the same profile can be resampled at a
    different resolution (needed by the two-resolution spurious filter).
    Profiles built from raw values fall back to barycentric resampling and
    spectral differentiation.
    """

    y: np.ndarray
    U: np.ndarray
    Upp: np.ndarray
    label: str = "profile"
    _generator: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.y.shape != self.U.shape or self.U.shape != self.Upp.shape:
            raise ValueError("node/value arrays must share a shape")
        if not (np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.Upp))):
            raise ValueError("profile values must be finite")

    @property
    def Ny(self) -> int:
        return self.y.shape[0]

    @classmethod
    def couette(cls, Ny: int) -> "ProfileSample":
        def gen(n):
            y = unit_nodes(n)
            return y, np.zeros(n)

        y = unit_nodes(Ny)
        return cls(y, y.copy(), np.zeros(Ny), label="couette", _generator=gen)

    @classmethod
    def from_shear(cls, p: ShearProfile, Ny: int) -> "ProfileSample":
        def gen(n):
            y = unit_nodes(n)
            return p.u(y), p.upp(y)

        y = unit_nodes(Ny)
        return cls(y, p.u(y), p.upp(y), label=f"oscillatory(c={p.c},n={p.n})",
                   _generator=gen)

    @classmethod
    def from_values(cls, U: np.ndarray, label: str = "sampled") -> "ProfileSample":
        """Profile given only by values on CGL nodes; U'' by collocation."""
        U = np.asarray(U, dtype=float)
        Ny = U.shape[0]
        y = unit_nodes(Ny)
        _, D2 = unit_diff_matrices(Ny, 2)
        return cls(y, U, D2 @ U, label=label)

    def at_resolution(self, Ny: int) -> "ProfileSample":
        if Ny == self.Ny:
            return self
        if self._generator is not None:
            U, Upp = self._generator(Ny)
            return ProfileSample(unit_nodes(Ny), U, Upp, self.label, self._generator)
        ynew = unit_nodes(Ny)
        U = unit_interp(self.U, ynew)
        _, D2 = unit_diff_matrices(Ny, 2)
        return ProfileSample(ynew, U, D2 @ U, self.label)


@dataclass
class SpectrumResult:
    """Converged part of one temporal spectrum.

    eigenvalues are phase speeds c sorted by descending Im(c); growth_rates
    are alpha*Im(c).  spurious holds the low-resolution candidates that had
    no partner at the paired resolution (kept for inspection/serialization).
    """

    kind: str
    alpha: float
    R: float | None
    eigenvalues: np.ndarray
    growth_rates: np.ndarray
    residuals: np.ndarray
    eigenfunctions: np.ndarray | None
    resolutions: tuple[int, int]
    n_raw: int
    spurious: np.ndarray

    @property
    def n_retained(self) -> int:
        return self.eigenvalues.shape[0]

    def max_growth(self) -> float:
        """Leading temporal growth rate; -inf when nothing converged."""
        if self.n_retained == 0:
            return float("-inf")
        return float(self.growth_rates[0])


def filter_spurious(low: np.ndarray, high: np.ndarray,
                    tol: float = DEFAULT_FILTER_TOL) -> np.ndarray:
    """Keep eigenvalues that persist across a resolution pair.

    Each low-resolution eigenvalue with a partner in `high` within `tol`
    (absolute distance in the complex c plane) retains that partner; the
    high-resolution value is the one reported.  Everything else is spurious.
    """
    low = np.asarray(low)
    high = np.asarray(high)
    low = low[np.isfinite(low)]
    high_f = high[np.isfinite(high)]
    if low.size == 0 or high_f.size == 0:
        return np.empty(0, dtype=complex)
    idx = set()
    for c0 in low:
        d = np.abs(high_f - c0)
        j = int(np.argmin(d))
        if d[j] < tol:
            idx.add(j)
    return high_f[sorted(idx)]


def _normalize_pencil(A, B):
    # scale both matrices together so residuals are measured against an O(1)
    # operator; the generalized eigenvalues are unchanged
    s = np.linalg.norm(A, np.inf)
    return A / s, B / s


def _rayleigh_matrices(sample: ProfileSample, alpha: float):
    Ny = sample.Ny
    _, D2 = unit_diff_matrices(Ny, 2)
    ii = slice(1, Ny - 1)
    L = D2[ii, ii] - alpha**2 * np.eye(Ny - 2)
    A = np.diag(sample.U[ii]) @ L - np.diag(sample.Upp[ii])
    return _normalize_pencil(A, L)


def _os_matrices(sample: ProfileSample, alpha: float, R: float):
    Ny = sample.Ny
    D1, D2, _, D4 = unit_diff_matrices(Ny, 4)
    I = np.eye(Ny)
    L = D2 - alpha**2 * I
    visc = (D4 - 2 * alpha**2 * D2 + alpha**4 * I) / (1j * alpha * R)
    A = (np.diag(sample.U) @ L - np.diag(sample.Upp) - visc).astype(complex)
    B = L.astype(complex)
    # clamped conditions replace the wall rows and their neighbours
    for r, row in ((0, I[0]), (1, D1[0]), (Ny - 2, D1[Ny - 1]), (Ny - 1, I[Ny - 1])):
        A[r] = row
        B[r] = 0.0
    return _normalize_pencil(A, B)


def _solve_filtered(build, sample, Ny, tol, res_tol, interior: bool):
    """Solve at (Ny, 2Ny-1), filter by persistence and residual.

    Returns values/vectors from the higher resolution.  `interior` says
    whether the operator lives on interior nodes only (Rayleigh) or the full
    node set (viscous row replacement).
    """
    lo_sample = sample.at_resolution(Ny)
    hi_sample = sample.at_resolution(2 * Ny - 1)
    try:
        A_lo, B_lo = build(lo_sample)
        w_lo = scipy.linalg.eig(A_lo, B_lo, right=False)
        A_hi, B_hi = build(hi_sample)
        w_hi, V_hi = scipy.linalg.eig(A_hi, B_hi, right=True)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SpectrumError(f"eigenvalue solve failed: {exc}") from exc

    matched = filter_spurious(w_lo, w_hi, tol)
    # map matched values back onto indices of the high-resolution solve
    idx = sorted(
        {int(np.argmin(np.abs(w_hi - c0))) for c0 in matched},
        key=lambda j: -w_hi[j].imag,
    )
    idx = np.asarray(idx, dtype=int)

    eigvals = np.empty(0, dtype=complex)
    funcs = None
    residuals = np.empty(0)
    if idx.size:
        V = V_hi[:, idx]
        V = V / np.linalg.norm(V, axis=0)
        res = np.linalg.norm(A_hi @ V - (B_hi @ V) * w_hi[idx], axis=0)
        ok = res <= res_tol
        idx = idx[ok]
        eigvals = w_hi[idx]
        residuals = res[ok]
        if idx.size:
            V = V[:, ok]
            if interior:
                funcs = np.zeros((hi_sample.Ny, idx.size), dtype=complex)
                funcs[1:-1] = V
            else:
                funcs = V
    if eigvals.size:
        spurious = np.asarray(
            [c for c in w_lo[np.isfinite(w_lo)]
             if np.min(np.abs(eigvals - c)) >= tol],
            dtype=complex,
        )
    else:
        spurious = w_lo[np.isfinite(w_lo)].astype(complex)
    return eigvals, residuals, funcs, spurious, int(w_lo[np.isfinite(w_lo)].size)


def rayleigh_spectrum(U: ProfileSample, alpha: float, Ny: int = 129,
                      filter_tol: float = DEFAULT_FILTER_TOL,
                      residual_tol: float = DEFAULT_RESIDUAL_TOL,
                      keep_eigenfunctions: bool = False) -> SpectrumResult:
    """Inviscid temporal spectrum of a profile at one streamwise wavenumber."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if Ny < 33:
        raise ValueError("Ny must be at least 33")
    eigvals, res, funcs, spurious, n_raw = _solve_filtered(
        lambda s: _rayleigh_matrices(s, alpha), U, Ny, filter_tol, residual_tol,
        interior=True,
    )
    return SpectrumResult(
        kind="rayleigh", alpha=alpha, R=None,
        eigenvalues=eigvals, growth_rates=alpha * eigvals.imag,
        residuals=res, eigenfunctions=funcs if keep_eigenfunctions else None,
        resolutions=(Ny, 2 * Ny - 1), n_raw=n_raw, spurious=spurious,
    )


def orr_sommerfeld_spectrum(U: ProfileSample, alpha: float, R: float,
                            Ny: int = 129,
                            filter_tol: float = DEFAULT_OS_FILTER_TOL,
                            residual_tol: float = DEFAULT_RESIDUAL_TOL,
                            keep_eigenfunctions: bool = False) -> SpectrumResult:
    """Viscous temporal spectrum at wavenumber alpha and Reynolds number R."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if R <= 0:
        raise ValueError("R must be positive")
    if Ny < 65:
        raise ValueError("Ny must be at least 65")
    eigvals, res, funcs, spurious, n_raw = _solve_filtered(
        lambda s: _os_matrices(s, alpha, R), U, Ny, filter_tol, residual_tol,
        interior=False,
    )
    return SpectrumResult(
        kind="orr-sommerfeld", alpha=alpha, R=float(R),
        eigenvalues=eigvals, growth_rates=alpha * eigvals.imag,
        residuals=res, eigenfunctions=funcs if keep_eigenfunctions else None,
        resolutions=(Ny, 2 * Ny - 1), n_raw=n_raw, spurious=spurious,
    )


def admissible_alphas(Lx: float, jmax: int) -> np.ndarray:
    """Wavenumbers 2*pi*j/Lx, j = 1..jmax, admitted by the periodic box."""
    if jmax < 1:
        raise ValueError("jmax must be at least 1")
    return 2.0 * np.pi * np.arange(1, jmax + 1) / Lx


@dataclass
class AlphaScanEntry:
    alpha: float
    max_growth: float
    n_retained: int
    error: str | None = None


@dataclass
class AlphaScan:
    kind: str
    R: float | None
    entries: list[AlphaScanEntry]

    @property
    def best(self) -> AlphaScanEntry:
        ok = [e for e in self.entries if e.error is None and np.isfinite(e.max_growth)]
        if not ok:
            raise SpectrumError("no wavenumber produced a converged spectrum")
        return max(ok, key=lambda e: e.max_growth)

    def max_growth(self) -> float:
        return self.best.max_growth


def scan_alpha(U: ProfileSample, alphas, R: float | None = None,
               Ny: int | None = None,
               filter_tol: float = DEFAULT_FILTER_TOL,
               residual_tol: float = DEFAULT_RESIDUAL_TOL) -> AlphaScan:
    """Leading growth rate per wavenumber; failures are recorded, not raised."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if alphas.size == 0:
        raise ValueError("alpha list must be nonempty")
    entries = []
    for a in alphas:
        try:
            if R is None:
                res = rayleigh_spectrum(U, a, Ny or 129, filter_tol, residual_tol)
            else:
                os_tol = max(filter_tol, DEFAULT_OS_FILTER_TOL)
                res = orr_sommerfeld_spectrum(U, a, R, Ny or 129, os_tol,
                                              residual_tol)
            entries.append(AlphaScanEntry(float(a), res.max_growth(), res.n_retained))
        except (SpectrumError, ValueError) as exc:
            entries.append(AlphaScanEntry(float(a), float("nan"), 0, error=str(exc)))
    return AlphaScan(kind="rayleigh" if R is None else "orr-sommerfeld",
                     R=R, entries=entries)
