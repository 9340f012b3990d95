"""Eigenvalues of real symmetric tridiagonal matrices by Sturm-count bisection."""
from __future__ import annotations

import numpy as np

__all__ = ["sturm_count", "tridiagonal_eigenvalues", "tridiagonal_parts"]


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues strictly less than ``x``.

    Counts negative pivots of the LDL^T factorization of ``T - x I``.
    """
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    for i in range(diag.size):
        b2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - b2 / q
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def tridiagonal_eigenvalues(diag, off, tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues, ascending, each bisected to absolute width ``tol``."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    if off.size != max(n - 1, 0):
        raise ValueError("off-diagonal must have length len(diag) - 1")
    radius = np.zeros(n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo0 = float(np.min(diag - radius)) - 1.0
    hi0 = float(np.max(diag + radius)) + 1.0
    out = np.empty(n)
    for k in range(n):
        # k-th eigenvalue: smallest x with count(x) > k
        lo, hi = lo0, hi0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm_count(diag, off, mid) > k:
                hi = mid
            else:
                lo = mid
        out[k] = 0.5 * (lo + hi)
    return out


def tridiagonal_parts(A: np.ndarray):
    """Diagonal and sub-diagonal of a real symmetric tridiagonal matrix."""
    A = np.asarray(A)
    if np.max(np.abs(A.imag if np.iscomplexobj(A) else 0)) > 0:
        raise ValueError("matrix is not real")
    A = np.real(A)
    if not np.allclose(A, A.T) or np.any(np.triu(A, 2)) or np.any(np.tril(A, -2)):
        raise ValueError("matrix is not symmetric tridiagonal")
    return np.diag(A).copy(), np.diag(A, -1).copy()
