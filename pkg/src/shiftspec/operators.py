"""Convolution multipliers, Toeplitz operators and shift powers.

Operators act exactly on finitely supported sequences. For weighted l2
spaces they can also be compressed to a finite index window; the matrix is
written in the coordinates ``x -> x * w`` in which the weighted space is
isometric to plain l2, so spectral norms of sections are operator norms.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, svds

from .errors import DomainError, UnsupportedNormError
from .spaces import FiniteSeq, SpaceSpec, WeightedLp
from .weights import Domain, shift_norm

__all__ = [
    "OperatorSpec",
    "FiniteSection",
    "NormBracket",
    "convolve",
    "project_plus",
    "apply_operator",
    "finite_section",
    "section_on_window",
    "largest_singular_value",
    "operator_norm_bracket",
]


def convolve(phi: FiniteSeq, f: FiniteSeq) -> FiniteSeq:
    """Exact convolution of two finitely supported sequences."""
    if phi.is_zero or f.is_zero:
        return FiniteSeq.zero()
    return FiniteSeq(phi.offset + f.offset, np.convolve(phi.coeffs, f.coeffs))


def project_plus(u: FiniteSeq) -> FiniteSeq:
    """Drop the coefficients at negative indices."""
    if u.is_zero or u.lo >= 0:
        return u
    if u.hi < 0:
        return FiniteSeq.zero()
    return FiniteSeq(0, u.coeffs[-u.lo:])


@dataclass(frozen=True)
class OperatorSpec:
    """A multiplier ``M_phi``, a Toeplitz operator ``T_phi`` or a shift power.

    On Z+ a shift power with ``k > 0`` is the unilateral shift to the k-th
    power and ``k < 0`` is the backward shift to the ``|k|``-th power; both
    coincide with the Toeplitz operator of the atom ``e_k``.
    """

    kind: str
    space: SpaceSpec
    phi: Optional[FiniteSeq] = None
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("multiplier", "toeplitz", "shift"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "shift":
            object.__setattr__(self, "phi", FiniteSeq.atom(int(self.k)))
        elif self.phi is None:
            raise ValueError(f"{self.kind} operator needs a symbol sequence phi")
        if self.kind == "toeplitz" and self.space.domain is not Domain.UNILATERAL:
            raise DomainError("Toeplitz operators live on a unilateral space")
        if self.kind == "multiplier" and self.space.domain is not Domain.BILATERAL:
            raise DomainError("multipliers live on a bilateral space")

    @classmethod
    def multiplier(cls, phi: FiniteSeq, space: SpaceSpec) -> "OperatorSpec":
        return cls("multiplier", space, phi)

    @classmethod
    def toeplitz(cls, phi: FiniteSeq, space: SpaceSpec) -> "OperatorSpec":
        return cls("toeplitz", space, phi)

    @classmethod
    def shift(cls, k: int, space: SpaceSpec) -> "OperatorSpec":
        return cls("shift", space, k=int(k))

    @property
    def unilateral(self) -> bool:
        return self.space.domain is Domain.UNILATERAL

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "shift":
            d["k"] = self.k
        else:
            d["phi"] = self.phi.to_dict()
        return d


def apply_operator(op: OperatorSpec, f: FiniteSeq) -> FiniteSeq:
    """Apply ``op`` to a finitely supported sequence in its space."""
    op.space.check_support(f)
    out = convolve(op.phi, f)
    return project_plus(out) if op.unilateral else out


# ---------------------------------------------------------------------------
# finite sections

@dataclass(frozen=True)
class FiniteSection:
    window: tuple  # (lo, hi), inclusive
    matrix: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.window[0], self.window[1] + 1)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def to_csv(self, path) -> None:
        """Write the matrix row-major, one matrix row per line as re,im pairs."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in self.matrix:
                w.writerow([repr(float(x)) for v in row for x in (v.real, v.imag)])


def _require_hilbert(space: SpaceSpec) -> None:
    if not space.is_hilbert:
        raise UnsupportedNormError("finite sections need a weighted l2 space (p = 2)")


def section_on_window(op: OperatorSpec, lo: int, hi: int) -> FiniteSection:
    """Compression of ``op`` to the index window ``[lo, hi]``.

    ``A[i, j] = phi(i - j) * w(i) / w(j)``. Only the diagonals carrying
    nonzero symbol coefficients are filled, so weight ratios far from the
    band (which may overflow) are never formed.
    """
    _require_hilbert(op.space)
    if op.unilateral and lo < 0:
        raise DomainError("window of a unilateral operator must start at 0 or later")
    n = hi - lo + 1
    idx = np.arange(lo, hi + 1)
    logw = op.space.norm.weight.log_values(idx)
    A = np.zeros((n, n), dtype=complex)
    for d, c in op.phi.items():
        if abs(d) >= n:
            continue
        i = np.arange(max(d, 0), n + min(d, 0))
        j = i - d
        A[i, j] = c * np.exp(logw[i] - logw[j])
    A.flags.writeable = False
    return FiniteSection((lo, hi), A)


def finite_section(op: OperatorSpec, N: int) -> FiniteSection:
    """Section on ``[-N, N]`` (bilateral) or ``[0, N]`` (unilateral)."""
    if N < 1:
        raise ValueError("N must be positive")
    lo = 0 if op.unilateral else -N
    return section_on_window(op, lo, N)


def _power_iteration(M, MH, tol: float, max_iter: int) -> float:
    n = M.shape[1]
    x = np.ones(n, dtype=complex) / math.sqrt(n)
    prev = 0.0
    best = 0.0
    for _ in range(max_iter):
        y = M @ x
        sigma = float(np.linalg.norm(y))
        best = max(best, sigma)
        if sigma == 0.0:
            break
        if abs(sigma - prev) <= tol * sigma:
            break
        prev = sigma
        x = MH @ y
        x /= np.linalg.norm(x)
    return best


def largest_singular_value(A, tol: float = 1e-10, max_iter: int = 10_000,
                           method: str = "lanczos") -> float:
    """Largest singular value of ``A``, never overestimated.

    ``method="power"`` runs power iteration on ``A^* A``; ``"lanczos"`` uses
    ARPACK, which converges far faster when the top singular values nearly
    coincide (as they do for Toeplitz sections). Both start from the
    normalized all-ones vector, and the value returned is ``||A v|| / ||v||``
    for the final iterate ``v``, so it is a lower bound.
    """
    M = sp.csr_matrix(A)
    MH = M.conj().T.tocsr()
    n = M.shape[1]
    if M.nnz == 0:
        return 0.0
    if method == "power" or min(M.shape) < 3:
        return _power_iteration(M, MH, tol, max_iter)
    if method != "lanczos":
        raise ValueError("method must be 'lanczos' or 'power'")
    v0 = np.ones(n, dtype=complex) / math.sqrt(n)
    try:
        _, _, vh = svds(M.astype(complex), k=1, v0=v0, tol=tol, maxiter=max_iter)
    except (ArpackNoConvergence, ArpackError):
        # exactly repeated singular values can stall the restarts
        return _power_iteration(M, MH, tol, max_iter)
    v = vh[0].conj()
    return float(np.linalg.norm(M @ v) / np.linalg.norm(v))


class NormBracket(NamedTuple):
    lower: Optional[float]
    upper: float


def symbol_norm_upper(phi: FiniteSeq, space: SpaceSpec) -> float:
    """``sum_k |phi(k)| * ||S^k||``: an upper bound for the operator norm."""
    total = 0.0
    for k, c in phi.items():
        sn = shift_norm(space, k)
        if math.isinf(sn):
            return math.inf
        total += abs(c) * sn
    return total


def operator_norm_bracket(op: OperatorSpec, N: int) -> NormBracket:
    """Lower/upper bounds on ``||op||``.

    The lower end is the spectral norm of the section at size ``N`` (absent
    unless p = 2); the upper end is the shift-norm sum of the symbol.
    """
    if not isinstance(op.space.norm, WeightedLp):
        raise UnsupportedNormError("operator norm bounds need a weighted lp space")
    upper = symbol_norm_upper(op.phi, op.space)
    lower = None
    if op.space.is_hilbert:
        lower = largest_singular_value(finite_section(op, N).matrix)
    return NormBracket(lower, upper)
