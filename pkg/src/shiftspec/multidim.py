"""Sequences on Z^k, joint spectra of the coordinate shifts and multipliers.

The joint region is computed exactly only for product weights whose factors
are constant, geometric or two-sided exponential; it is then the product of
the per-coordinate shift spectra. Everything else is bounded from outside by
exclusion tests.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.signal import convolve as nd_convolve

from .errors import PoleError, PreconditionError, UnsupportedNormError
from .spaces import SpaceSpec, WeightedLp
from .spectra import EQUALITY, predicted_sigma_shift
from .symbols import PointCloud, _radial_grid
from .verify import (DELTA_FRACTION, IDENTITY_TOL, INCONCLUSIVE, OUTSIDE_BOUND, TAIL_TOL,
                     Certificate, _side_tail)
from .weights import Domain, log_shift_norm, shift_norm

__all__ = [
    "MultiIndexSeq",
    "JointRegion",
    "Exclusion",
    "multi_convolve",
    "eval_symbol_multi",
    "joint_region_separable",
    "joint_exclusion_test",
    "exclusion_test_family",
    "predicted_sigma_multiplier_multi",
    "approx_eigen_residual_multi",
    "outside_certificate_multi",
]

EXACT_FAMILIES = ("constant", "geometric", "two_sided_exp")
MAX_DIM = 3
_EXCLUSION_RTOL = 1e-9


class MultiIndexSeq:
    """A finitely supported complex sequence on Z^k, k >= 2.

    Stored densely as a k-dimensional array whose entry ``[0, ..., 0]`` sits
    at multi-index ``offset``.
    """

    __slots__ = ("offset", "array")

    def __init__(self, offset, array):
        a = np.array(array, dtype=complex)
        if a.ndim < 2:
            raise ValueError("multi-index sequences need k >= 2")
        if len(offset) != a.ndim:
            raise ValueError("offset length must match the array dimension")
        nz = np.argwhere(a != 0)
        if nz.size == 0:
            offset, a = (0,) * a.ndim, np.zeros((0,) * a.ndim, dtype=complex)
        else:
            lo, hi = nz.min(axis=0), nz.max(axis=0)
            a = a[tuple(slice(l, h + 1) for l, h in zip(lo, hi))]
            offset = tuple(int(o) + int(l) for o, l in zip(offset, lo))
        a.flags.writeable = False
        object.__setattr__(self, "offset", tuple(int(o) for o in offset))
        object.__setattr__(self, "array", a)

    def __setattr__(self, name, value):
        raise AttributeError("MultiIndexSeq is immutable")

    def __reduce__(self):
        return (MultiIndexSeq, (self.offset, np.array(self.array)))

    @classmethod
    def from_mapping(cls, mapping: dict, k: int = None) -> "MultiIndexSeq":
        if not mapping:
            if k is None:
                raise ValueError("empty mapping needs an explicit dimension")
            return cls((0,) * k, np.zeros((0,) * k))
        keys = np.array(list(mapping), dtype=int)
        if k is not None and keys.shape[1] != k:
            raise ValueError("index tuples do not match the dimension")
        lo = keys.min(axis=0)
        a = np.zeros(tuple(keys.max(axis=0) - lo + 1), dtype=complex)
        for n, v in mapping.items():
            a[tuple(np.array(n) - lo)] += v
        return cls(tuple(lo), a)

    @classmethod
    def atom(cls, n, value=1.0) -> "MultiIndexSeq":
        return cls(tuple(n), np.full((1,) * len(n), value, dtype=complex))

    @property
    def k(self) -> int:
        return self.array.ndim

    @property
    def is_zero(self) -> bool:
        return self.array.size == 0

    @property
    def entries(self) -> dict:
        return {tuple(int(o + i) for o, i in zip(self.offset, idx)): complex(self.array[tuple(idx)])
                for idx in np.argwhere(self.array != 0)}

    def axis_indices(self, axis: int) -> np.ndarray:
        return self.offset[axis] + np.arange(self.array.shape[axis])

    def __add__(self, other: "MultiIndexSeq") -> "MultiIndexSeq":
        d = self.entries
        for n, v in other.entries.items():
            d[n] = d.get(n, 0) + v
        return MultiIndexSeq.from_mapping(d, self.k)

    def __sub__(self, other: "MultiIndexSeq") -> "MultiIndexSeq":
        return self + other * -1.0

    def __mul__(self, c) -> "MultiIndexSeq":
        return MultiIndexSeq(self.offset, self.array * c) if not self.is_zero else self

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiIndexSeq) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        return f"MultiIndexSeq({self.entries!r})"

    def to_dict(self) -> dict:
        return {"k": self.k,
                "entries": [[list(n), [v.real, v.imag]] for n, v in sorted(self.entries.items())]}

    @classmethod
    def from_dict(cls, d: dict) -> "MultiIndexSeq":
        return cls.from_mapping({tuple(n): complex(*v) for n, v in d["entries"]}, int(d["k"]))


def multi_convolve(phi: MultiIndexSeq, f: MultiIndexSeq) -> MultiIndexSeq:
    """Exact convolution on Z^k."""
    if phi.k != f.k:
        raise ValueError("dimension mismatch")
    if phi.is_zero or f.is_zero:
        return MultiIndexSeq.from_mapping({}, phi.k)
    a = nd_convolve(phi.array, f.array, method="direct")
    return MultiIndexSeq(tuple(p + q for p, q in zip(phi.offset, f.offset)), a)


def _axis_powers(z: complex, n: np.ndarray, axis: int):
    if z == 0 and np.any(n < 0):
        raise PoleError(f"negative power of coordinate {axis} evaluated at 0")
    return np.asarray(z, dtype=complex) ** n


def eval_symbol_multi(phi: MultiIndexSeq, z) -> complex:
    """``sum_n phi(n) z_1**n_1 ... z_k**n_k``."""
    z = tuple(complex(v) for v in z)
    if len(z) != phi.k:
        raise ValueError("point dimension does not match the symbol")
    if phi.is_zero:
        return 0j
    acc = phi.array
    # contract the last axis first so the remaining array keeps its leading axes
    for axis in reversed(range(phi.k)):
        acc = acc @ _axis_powers(z[axis], phi.axis_indices(axis).astype(float), axis)
    return complex(acc)


def _eval_on_grid(phi: MultiIndexSeq, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Symbol values on the tensor grid ``axes[0] x ... x axes[k-1]``."""
    acc = phi.array
    for axis in range(phi.k):
        n = phi.axis_indices(axis).astype(float)
        pts = np.asarray(axes[axis], dtype=complex)
        if np.any(pts == 0) and np.any(n < 0):
            raise PoleError(f"negative power of coordinate {axis} evaluated at 0")
        V = pts[:, None] ** n[None, :]
        # contract the current leading axis; the new grid axis goes to the back
        acc = np.tensordot(acc, V, axes=([0], [1]))
    return acc


# ---------------------------------------------------------------------------
# joint regions

@dataclass(frozen=True)
class JointRegion:
    """Product of per-coordinate shift spectra (circles or annuli)."""

    factors: tuple
    exact: bool = True
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.factors)

    def radii(self, axis: int):
        f = self.factors[axis]
        return f.rmin, f.rmax

    def contains(self, z, rtol: float = 1e-9) -> bool:
        return all(f.rmin * (1 - rtol) <= abs(complex(v)) <= f.rmax * (1 + rtol)
                   for f, v in zip(self.factors, z))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        """``count`` points drawn uniformly in angle and log-radius per axis."""
        rng = np.random.default_rng(seed)
        out = np.empty((count, self.k), dtype=complex)
        for i, f in enumerate(self.factors):
            lr = rng.uniform(math.log(f.rmin), math.log(f.rmax), count)
            th = rng.uniform(0, 2 * math.pi, count)
            out[:, i] = np.exp(lr + 1j * th)
        return out

    def to_dict(self) -> dict:
        return {"variant": "joint", "exact": self.exact,
                "factors": [f.to_dict() for f in self.factors], **self.metadata}


def _check_separable(spaces: Sequence[SpaceSpec]) -> None:
    if not (2 <= len(spaces) <= MAX_DIM):
        raise ValueError(f"joint regions are supported for 2 <= k <= {MAX_DIM}")
    for s in spaces:
        if s.domain is not Domain.BILATERAL:
            raise PreconditionError("joint regions need bilateral factor spaces")
        if not (isinstance(s.norm, WeightedLp) and s.is_hilbert):
            raise UnsupportedNormError("joint regions need weighted l2 factors")


def joint_region_separable(spaces: Sequence[SpaceSpec]) -> JointRegion:
    """Joint spectrum of the coordinate shifts for a product weight.

    Each factor must carry a constant, geometric or two-sided exponential
    weight; the region is the product of the factor shift spectra.
    """
    _check_separable(spaces)
    for s in spaces:
        if s.weight.kind not in EXACT_FAMILIES:
            raise UnsupportedNormError(
                f"no exact joint region for weight family {s.weight.kind!r}")
    factors = tuple(predicted_sigma_shift(s) for s in spaces)
    if any(not math.isfinite(f.rmax) or f.rmin == 0 for f in factors):
        raise PreconditionError("joint regions need bounded invertible coordinate shifts")
    return JointRegion(factors, True, {"weights": [s.weight.kind for s in spaces]})


# ---------------------------------------------------------------------------
# exclusion

class Exclusion(NamedTuple):
    excluded: bool
    witness: Optional[MultiIndexSeq]
    value: float = math.nan
    bound: float = math.nan

    @property
    def verdict(self) -> str:
        return "excluded" if self.excluded else "unknown"


def _weighted_bound(phi: MultiIndexSeq, spaces) -> float:
    total = 0.0
    for n, v in phi.entries.items():
        prod = 1.0
        for s, ni in zip(spaces, n):
            prod *= shift_norm(s, ni)
        total += abs(v) * prod
    return total


def exclusion_test_family(k: int, degree: int = 4, random_count: int = 64,
                          random_degree: int = 2, seed: int = 0):
    """Monomials with ``|n_i| <= degree`` followed by seeded random polynomials."""
    rng = np.random.default_rng(seed)
    monomials = itertools.product(range(-degree, degree + 1), repeat=k)
    for n in sorted(monomials, key=lambda n: (sum(map(abs, n)), n)):
        yield MultiIndexSeq.atom(n)
    shape = (2 * random_degree + 1,) * k
    for _ in range(random_count):
        a = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * (rng.random(shape) < 0.5)
        if not np.any(a):
            a.flat[0] = 1.0
        yield MultiIndexSeq((-random_degree,) * k, a)


def joint_exclusion_test(z, spaces: Sequence[SpaceSpec], degree: int = 4,
                         random_count: int = 64, seed: int = 0) -> Exclusion:
    """Look for ``phi`` with ``|phi~(z)| > sum |phi(n)| prod ||S_i^n_i||``.

    The right-hand side bounds ``||M_phi||``, so such a ``phi`` proves ``z`` is
    outside the joint spectrum. Finding none proves nothing.
    """
    _check_separable(spaces)
    z = tuple(complex(v) for v in z)
    if len(z) != len(spaces):
        raise ValueError("point dimension does not match the spaces")
    for phi in exclusion_test_family(len(spaces), degree, random_count, seed=seed):
        try:
            val = abs(eval_symbol_multi(phi, z))
        except PoleError:
            # the symbol is unbounded near z; z is excluded by a monomial anyway
            continue
        bound = _weighted_bound(phi, spaces)
        if val > bound * (1 + _EXCLUSION_RTOL):
            return Exclusion(True, phi, val, bound)
    return Exclusion(False, None)


# ---------------------------------------------------------------------------
# multiplier predictions

def _axis_grid(factor, angular: int, radial: int) -> np.ndarray:
    # same polar grid as the one-variable images, so clouds are comparable
    theta = 2 * math.pi * np.arange(angular) / angular
    radii = _radial_grid(factor.rmin, factor.rmax, radial)
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


def predicted_sigma_multiplier_multi(phi: MultiIndexSeq, spaces: Sequence[SpaceSpec],
                                     angular: int = 256, radial: int = 9) -> PointCloud:
    """Symbol image of the joint region, sampled on a tensor polar grid.

    Circle factors contribute ``angular`` points, annulus factors
    ``radial * angular``. The image is the whole spectrum of ``M_phi``.
    """
    region = joint_region_separable(spaces)
    if phi.k != region.k:
        raise ValueError("symbol dimension does not match the spaces")
    axes = [_axis_grid(f, angular, radial) for f in region.factors]
    vals = _eval_on_grid(phi, axes)
    pitch = 0.0
    for axis in range(vals.ndim):
        # neighbours along each axis: adjacent angles, then adjacent radii
        v = np.moveaxis(vals, axis, -1)
        v = v.reshape(v.shape[:-1] + (-1, angular))
        d = np.abs(np.diff(np.concatenate([v, v[..., :1]], axis=-1), axis=-1))
        pitch = max(pitch, float(d.max()))
        if v.shape[-2] > 1:
            pitch = max(pitch, float(np.abs(np.diff(v, axis=-2)).max()))
    meta = {"relation": EQUALITY, "angular": angular, "radial": radial,
            "pitch": pitch, "region": region.to_dict()}
    return PointCloud(vals.ravel(), meta)


def approx_eigen_residual_multi(phi: MultiIndexSeq, z, spaces: Sequence[SpaceSpec], N: int) -> float:
    """Relative residual of the tensor vector ``prod_i z_i**-n_i`` on ``[-N, N]^k``."""
    _check_separable(spaces)
    z = tuple(complex(v) for v in z)
    if len(z) != len(spaces) or phi.k != len(spaces):
        raise ValueError("dimension mismatch between symbol, point and spaces")
    n = np.arange(-N, N + 1, dtype=float)
    f = np.ones(())
    for zi in z:
        f = np.multiply.outer(f, zi ** -n)
    mu = eval_symbol_multi(phi, z)
    if phi.is_zero:
        return 0.0
    g = nd_convolve(phi.array, f, method="direct")
    # common box holding both the window and the support of phi * f
    lo = [min(-N, -N + o) for o in phi.offset]
    hi = [max(N, N + o + s - 1) for o, s in zip(phi.offset, phi.array.shape)]
    r = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)), dtype=complex)
    r[tuple(slice(-N + o - l, -N + o - l + gs) for o, l, gs in zip(phi.offset, lo, g.shape))] += g
    r[tuple(slice(-N - l, N + 1 - l) for l in lo)] -= mu * f
    logw = np.zeros(())
    logf = np.zeros(())
    for s, l, h in zip(spaces, lo, hi):
        logw = np.add.outer(logw, s.weight.log_values(np.arange(l, h + 1)))
        logf = np.add.outer(logf, s.weight.log_values(np.arange(-N, N + 1)))
    return _weighted_l2(r, logw) / _weighted_l2(f, logf)


def _weighted_l2(a: np.ndarray, logw: np.ndarray) -> float:
    mag = np.abs(a)
    with np.errstate(divide="ignore"):
        la = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)) + logw, -np.inf)
    m = float(np.max(la))
    if not math.isfinite(m):
        return 0.0 if m == -math.inf else math.inf
    return math.exp(m) * math.sqrt(float(np.sum(np.exp(2 * (la - m)))))


# ---------------------------------------------------------------------------
# outside certificate on Z^k

def _lipschitz_multi(phi: MultiIndexSeq, radii) -> float:
    """Bound on the sum over axes of ``|d/dtheta_i phi~(r e^{i theta})|``."""
    total = 0.0
    for n, v in phi.entries.items():
        mag = abs(v) * math.prod(r ** ni for r, ni in zip(radii, n))
        total += mag * sum(abs(ni) for ni in n)
    return total


def _check_grid_radii(factor, count: int = 10) -> np.ndarray:
    if factor.rmin == factor.rmax:
        return np.array([factor.rmax])
    return np.geomspace(factor.rmin, factor.rmax, count)


def outside_certificate_multi(phi: MultiIndexSeq, lam: complex, spaces: Sequence[SpaceSpec],
                              m: int = 512, check_grid: int = 256,
                              tail_tol: float = TAIL_TOL, max_m: int = 1024) -> Certificate:
    """Certify ``lam`` outside the spectrum of ``M_phi`` on a product-weighted Z^k space.

    Coefficients of ``1/(phi~ - lam)`` are taken orthant by orthant: for a
    multi-index with sign pattern ``s`` the k-dimensional transform runs on
    the polytorus whose i-th radius is the outer radius of factor i when
    ``s_i >= 0`` and the inner one otherwise. The weighted coefficient sum
    bounds the inverse.
    """
    region = joint_region_separable(spaces)
    k = region.k
    if phi.k != k:
        raise ValueError("symbol dimension does not match the spaces")
    if m < 64 or m & (m - 1):
        raise PreconditionError("per-axis transform size must be a power of two >= 64")
    lam = complex(lam)
    params = {"lambda": [lam.real, lam.imag], "m": m, "check_grid": check_grid,
              "phi": phi.to_dict(), "tail_tol": tail_tol,
              "radii": [[f.rmin, f.rmax] for f in region.factors]}

    # (i) distance from lam on the check polytori
    theta = 2 * math.pi * np.arange(check_grid) / check_grid
    circ = np.exp(1j * theta)
    delta, smax = math.inf, 0.0
    for radii in itertools.product(*[_check_grid_radii(f) for f in region.factors]):
        v = _eval_on_grid(phi, [r * circ for r in radii])
        slack = _lipschitz_multi(phi, radii) * math.pi / check_grid
        delta = min(delta, float(np.min(np.abs(v - lam))) - slack)
        smax = max(smax, float(np.max(np.abs(v))))
    if delta < DELTA_FRACTION * max(smax, abs(lam)):
        return Certificate(INCONCLUSIVE, {"delta": delta}, params,
                           "symbol comes within delta of lambda")

    psi = phi - MultiIndexSeq.atom((0,) * k, lam)
    centre = [math.sqrt(f.rmin * f.rmax) for f in region.factors]
    size = m
    while True:
        ident, t, idx = _orthant_transform(phi, psi, lam, region, spaces, centre, size)
        if not ident <= IDENTITY_TOL:
            return Certificate(INCONCLUSIVE, {"delta": delta, "identity_residual": ident}, params,
                               "convolution identity fails on the window")
        B, tail, ratios = _multi_bound(t, idx)
        if (math.isfinite(B) and tail < tail_tol) or size >= max_m:
            break
        size *= 2
    params["m"] = size
    ev = {"delta": delta, "identity_residual": ident, "B": B + tail, "B_partial": B,
          "tail": tail, "decay_ratio": ratios}
    if not math.isfinite(B) or not tail < tail_tol:
        return Certificate(INCONCLUSIVE, ev, params, "weighted coefficient sum not certified finite")
    return Certificate(OUTSIDE_BOUND, ev, params)


def _orthant_transform(phi, psi, lam, region, spaces, centre, m):
    """Identity residual and weighted coefficient magnitudes at transform size ``m``.

    For an index with sign pattern ``s`` the coefficient is ``F_n`` from the
    polytorus with radius ``rmax_i`` (``s_i >= 0``) or ``rmin_i`` (``s_i < 0``),
    divided by ``prod_i r_i**n_i``. Everything is kept in scaled form so that
    no power of a radius is formed explicitly.
    """
    k = region.k
    idx = np.arange(-(m // 2), m // 2)
    circ = np.exp(2j * math.pi * np.arange(m) / m)
    F = np.zeros((m,) * k, dtype=complex)
    for signs in itertools.product((1, -1), repeat=k):
        radii = [f.rmax if s > 0 else f.rmin for f, s in zip(region.factors, signs)]
        vals = _eval_on_grid(phi, [r * circ for r in radii])
        # after the shift, position j holds the coefficient of index idx[j]
        G = np.fft.fftshift(np.fft.fftn(1.0 / (vals - lam))) / m ** k
        sel = np.ix_(*[idx >= 0 if s > 0 else idx < 0 for s in signs])
        F[sel] = G[sel]
    logr = [np.where(idx >= 0, math.log(f.rmax), math.log(f.rmin)) for f in region.factors]

    def outer(vectors):
        acc = np.ones(())
        for v in vectors:
            acc = np.multiply.outer(acc, v)
        return acc

    # identity check after the invariant scaling n -> prod_i c_i**n_i
    with np.errstate(over="ignore", invalid="ignore"):
        sc = outer([np.exp(idx * (math.log(c) - lr)) for c, lr in zip(centre, logr)])
        spsi = outer([c ** psi.axis_indices(a).astype(float) for a, c in enumerate(centre)])
    prod = nd_convolve(F * sc, psi.array * spsi, method="direct")
    # prod[j] sits at multi-index -m/2 + psi.offset + j; entries with
    # j_i in [shape_i - 1, m - 1] only involve in-range coefficients
    win = tuple(slice(sh - 1, m) for sh in psi.array.shape)
    block = prod[win]
    target = np.zeros_like(block)
    zero = tuple(m // 2 - o - (sh - 1) for o, sh in zip(psi.offset, psi.array.shape))
    if all(0 <= zi < bs for zi, bs in zip(zero, block.shape)):
        target[zero] = 1.0
    ident = float(np.max(np.abs(block - target)))

    with np.errstate(over="ignore", invalid="ignore"):
        wt = outer([np.exp(np.array([log_shift_norm(s, int(j)) for j in idx]) - idx * lr)
                    for s, lr in zip(spaces, logr)])
        a = np.abs(F)
        t = np.where(a == 0, 0.0, a * wt)
    return ident, t, idx


def _multi_bound(t: np.ndarray, idx: np.ndarray):
    k = t.ndim
    B = float(np.sum(t))
    scale = float(np.max(t)) if t.size else 0.0
    tail = 0.0
    ratios = []
    for axis in range(k):
        other = tuple(a for a in range(k) if a != axis)
        marg = np.sum(t, axis=other)
        qp, tp = _side_tail(marg[idx >= 0], scale)
        qn, tn = _side_tail(marg[idx < 0][::-1], scale)
        ratios.append({"positive": qp, "negative": qn})
        tail += tp + tn
    return B, tail, ratios
