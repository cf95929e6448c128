"""
Symmetric cyclic tridiagonal solvers.

A cyclic tridiagonal matrix is stored as two length-n vectors: ``diag`` and
``off``, where ``off[k]`` couples unknowns ``k-1`` and ``k`` (so ``off[0]`` is
the corner entry coupling ``n-1`` and ``0``).  Leading dimensions are treated
as a batch of independent systems.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

__all__ = ['CyclicTridiagonal', 'NearSingularError', 'solve_cyclic', 'solve_dense']

PIVOT_RTOL = 1e-14


class NearSingularError(ValueError):
    """Raised when elimination meets a pivot below the relative threshold."""

    def __init__(self, message, smallest_pivot):
        super().__init__(message)
        self.smallest_pivot = smallest_pivot


@dataclass(frozen=True)
class CyclicTridiagonal:
    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.off, dtype=float)
        if diag.shape != off.shape:
            raise ValueError(f'diag and off shapes differ: {diag.shape} vs {off.shape}')
        if diag.ndim == 0 or diag.shape[-1] < 3:
            raise ValueError('cyclic tridiagonal systems need n >= 3')
        object.__setattr__(self, 'diag', diag)
        object.__setattr__(self, 'off', off)

    @property
    def n(self):
        return self.diag.shape[-1]

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        return (self.diag * x + self.off * np.roll(x, 1, axis=-1)
                + np.roll(self.off, -1, axis=-1) * np.roll(x, -1, axis=-1))

    def dense(self):
        """Dense (n, n) matrix; only for unbatched systems."""
        if self.diag.ndim != 1:
            raise ValueError('dense() expects an unbatched system')
        n = self.n
        A = np.diag(self.diag)
        k = np.arange(n)
        A[k, k - 1] += self.off
        A[k - 1, k] += self.off
        return A

    def row_scale(self):
        return np.abs(self.diag) + np.abs(self.off) + np.abs(np.roll(self.off, -1, axis=-1))

    def is_dominant(self):
        """Strict diagonal dominance |d_k| > |off_k| + |off_{k+1}| for every row."""
        return np.all(np.abs(self.diag) > np.abs(self.off) + np.abs(np.roll(self.off, -1, axis=-1)))


def _thomas_scalar(lower, diag, upper, rhs_cols, tol):
    # pure-Python elimination: much faster than numpy indexing for a single system
    n = len(diag)
    cp = [0.0] * n
    cols = [list(r) for r in rhs_cols]
    smallest = abs(diag[0])
    piv = diag[0]
    if abs(piv) <= tol[0]:
        return None, abs(piv)
    cp[0] = upper[0] / piv
    for r in cols:
        r[0] /= piv
    for k in range(1, n):
        piv = diag[k] - lower[k] * cp[k - 1]
        a = abs(piv)
        if a < smallest:
            smallest = a
        if a <= tol[k]:
            return None, a
        cp[k] = upper[k] / piv if k < n - 1 else 0.0
        lk = lower[k]
        for r in cols:
            r[k] = (r[k] - lk * r[k - 1]) / piv
    for r in cols:
        for k in range(n - 2, -1, -1):
            r[k] -= cp[k] * r[k + 1]
    return [np.array(r) for r in cols], smallest


def _thomas_batched(lower, diag, upper, rhs, tol):
    # coefficient arrays are (n, batch...), rhs is (n, batch..., ncols)
    n = diag.shape[0]
    cp = np.empty_like(diag)
    x = np.array(rhs, dtype=float)
    piv = diag[0]
    smallest = np.abs(piv)
    if np.any(smallest <= tol[0]):
        return None, np.min(smallest)
    cp[0] = upper[0] / piv
    x[0] /= piv[..., None]
    for k in range(1, n):
        piv = diag[k] - lower[k] * cp[k - 1]
        smallest = np.minimum(smallest, np.abs(piv))
        if np.any(np.abs(piv) <= tol[k]):
            return None, np.min(np.abs(piv))
        cp[k] = upper[k] / piv
        x[k] = (x[k] - lower[k][..., None] * x[k - 1]) / piv[..., None]
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k][..., None] * x[k + 1]
    return x, np.min(smallest)


def solve_cyclic(system, rhs):
    """Solve ``A x = rhs`` for a symmetric cyclic tridiagonal ``A`` in O(n).

    Thomas elimination on the tridiagonal core, with the two corner entries
    handled by a rank-one (Sherman-Morrison) correction.

    Parameters
    ----------
    system : CyclicTridiagonal
        Possibly batched over leading dimensions.
    rhs : array_like
        Same shape as ``system.diag``.

    Raises
    ------
    NearSingularError
        If a pivot or the correction denominator falls below
        ``1e-14`` times the row scale.
    """
    d = system.diag
    t = system.off
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != d.shape:
        raise ValueError(f'rhs shape {rhs.shape} does not match system shape {d.shape}')
    scale = system.row_scale()
    tol = PIVOT_RTOL * np.where(scale > 0, scale, 1.0)

    # A = B + u v^T with u = (g, 0, .., 0, t0), v = (1, 0, .., 0, t0/g)
    corner = t[..., 0]
    g = -d[..., 0]
    g = np.where(g == 0, -1.0, g)
    bdiag = d.copy()
    bdiag[..., 0] = d[..., 0] - g
    bdiag[..., -1] = d[..., -1] - corner * corner / g
    lower = t.copy()
    lower[..., 0] = 0.0
    upper = np.roll(t, -1, axis=-1)
    upper[..., -1] = 0.0
    u = np.zeros_like(d)
    u[..., 0] = g
    u[..., -1] = corner

    if d.ndim == 1:
        sol, smallest = _thomas_scalar(lower.tolist(), bdiag.tolist(), upper.tolist(),
                                       [rhs.tolist(), u.tolist()], tol.tolist())
        if sol is None:
            raise NearSingularError(f'near-singular system: pivot {smallest:.3e}', smallest)
        y, q = sol
    else:
        stacked = np.stack([rhs, u], axis=-1)             # (..., n, 2)
        moved = np.moveaxis(stacked, -2, 0)              # (n, ..., 2)
        sol, smallest = _thomas_batched(np.moveaxis(lower, -1, 0), np.moveaxis(bdiag, -1, 0),
                                        np.moveaxis(upper, -1, 0), moved, np.moveaxis(tol, -1, 0))
        if sol is None:
            raise NearSingularError(f'near-singular system: pivot {smallest:.3e}', smallest)
        sol = np.moveaxis(sol, 0, -2)
        y, q = sol[..., 0], sol[..., 1]

    vy = y[..., 0] + corner / g * y[..., -1]
    vq = q[..., 0] + corner / g * q[..., -1]
    denom = 1.0 + vq
    if np.any(np.abs(denom) <= PIVOT_RTOL * (1.0 + np.abs(vq))):
        smallest = float(np.min(np.abs(denom)))
        raise NearSingularError(f'near-singular corner correction: denominator {smallest:.3e}',
                                smallest)
    return y - (vy / denom)[..., None] * q


def solve_dense(system, rhs):
    """Gaussian elimination with partial pivoting on the assembled matrix.

    O(n^3); meant as a test oracle and as the fallback for systems the
    cyclic solver rejects.
    """
    if system.diag.ndim > 1:
        return np.stack([solve_dense(CyclicTridiagonal(dd, oo), rr)
                         for dd, oo, rr in zip(system.diag.reshape(-1, system.n),
                                               system.off.reshape(-1, system.n),
                                               np.reshape(rhs, (-1, system.n)))]).reshape(system.diag.shape)
    A = system.dense()
    n = system.n
    with warnings.catch_warnings():
        # exact singularity is reported below with the pivot position
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    k = int(np.argmin(pivots))
    if pivots[k] <= 1e-15 * max(np.max(np.abs(A)), 1e-300) * n:
        raise NearSingularError(f'singular matrix: zero pivot in column {k}', float(pivots[k]))
    return lu_solve((lu, piv), np.asarray(rhs, dtype=float), check_finite=False)
