"""Chebyshev collocation machinery on the unit interval.

Everything here works on Chebyshev-Gauss-Lobatto (CGL) nodes mapped from the
standard interval [-1, 1] to the channel coordinate y in [0, 1].  The node
ordering is ascending in y, with both walls (y = 0 and y = 1) included
exactly.  Differentiation matrices follow Weideman & Reddy's recipe
(trigonometric node differences plus the negative-sum trick), which keeps
high-order derivatives accurate at large N.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz


def _chebdif(N: int, M: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """CGL nodes on [-1, 1] (descending) and the first M derivative matrices."""
    if N < 2:
        raise ValueError("need at least two nodes")
    if M >= N:
        raise ValueError("derivative order must be below the node count")
    n1 = N // 2
    n2 = (N + 1) // 2
    k = np.arange(N).reshape(N, 1)
    th = k * np.pi / (N - 1)
    # x(k) - x(j) via trig identities in [0, pi/2]; better than direct cos diff
    T = np.tile(th / 2, (1, N))
    DX = 2.0 * np.sin(T.T + T) * np.sin(T.T - T)
    DX = np.vstack((DX[:n1], -np.flipud(np.fliplr(DX[:n2]))))
    np.fill_diagonal(DX, 1.0)

    C = toeplitz((-1.0) ** k.ravel())
    C[0, :] *= 2.0
    C[-1, :] *= 2.0
    C[:, 0] /= 2.0
    C[:, -1] /= 2.0

    Z = 1.0 / DX
    np.fill_diagonal(Z, 0.0)

    D = np.eye(N)
    out = []
    for ell in range(1, M + 1):
        D = ell * Z * (C * np.tile(np.diag(D).reshape(N, 1), (1, N)) - D)
        np.fill_diagonal(D, 0.0)
        np.fill_diagonal(D, -D.sum(axis=1))
        out.append(D.copy())
    x = np.sin(np.pi * np.arange(N - 1, -N, -2) / (2 * (N - 1)))
    return x, out


def _clencurt(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights for the N CGL nodes of [-1, 1].

    Exact for polynomials up to degree N-1.  Node ordering is irrelevant
    (the weights are symmetric).
    """
    n = N - 1
    if n == 0:
        return np.array([2.0])
    theta = np.pi * np.arange(N) / n
    w = np.zeros(N)
    v = np.ones(N - 2)
    if n % 2 == 0:
        w[0] = w[-1] = 1.0 / (n**2 - 1)
        for kk in range(1, n // 2):
            v -= 2.0 * np.cos(2.0 * kk * theta[1:-1]) / (4.0 * kk**2 - 1)
        v -= np.cos(n * theta[1:-1]) / (n**2 - 1)
    else:
        w[0] = w[-1] = 1.0 / n**2
        for kk in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2.0 * kk * theta[1:-1]) / (4.0 * kk**2 - 1)
    w[1:-1] = 2.0 * v / n
    return w


def unit_nodes(N: int) -> np.ndarray:
    """CGL nodes on [0, 1], ascending, walls included exactly."""
    x, _ = _chebdif(N, 1)
    y = (1.0 - x) / 2.0
    y[0] = 0.0
    y[-1] = 1.0
    return y


def unit_diff_matrices(N: int, M: int = 2) -> list[np.ndarray]:
    """First M derivative matrices on the ascending [0, 1] CGL nodes.

    The map y = (1 - x)/2 sends the descending [-1, 1] ordering to ascending
    y without reindexing; each derivative picks up a factor (-2)^m.
    """
    _, DM = _chebdif(N, M)
    return [(-2.0) ** (m + 1) * DM[m] for m in range(M)]


def unit_quad_weights(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights for integration over [0, 1] on unit_nodes."""
    return 0.5 * _clencurt(N)


def unit_interp(f: np.ndarray, ynew: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from the [0, 1] CGL nodes carrying f to ynew.

    Uses the closed-form CGL barycentric weights (+-1 with halved endpoints),
    so the evaluation is stable for any N.
    """
    N = f.shape[0]
    y = unit_nodes(N)
    wbar = (-1.0) ** np.arange(N)
    wbar[0] *= 0.5
    wbar[-1] *= 0.5
    out = np.empty(ynew.shape[0])
    for i, yy in enumerate(ynew):
        d = yy - y
        hit = np.where(d == 0.0)[0]
        if hit.size:
            out[i] = f[hit[0]]
        else:
            q = wbar / d
            out[i] = (q @ f) / q.sum()
    return out
