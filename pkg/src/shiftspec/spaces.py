"""Finitely supported sequences, sequence-space descriptions and their norms.

Three norm families are supported: weighted lp, weighted Orlicz (Luxemburg
norm) and variable exponent. The last two are computed by bisection on the
modular.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .weights import Domain, WeightFamily

__all__ = [
    "FiniteSeq",
    "OrliczFunction",
    "ExponentRule",
    "WeightedLp",
    "Orlicz",
    "VariableExponent",
    "SpaceSpec",
    "space_norm",
    "scale_seq",
]


class FiniteSeq:
    """A finitely supported complex sequence on Z.

    Stored as ``offset`` (index of the first coefficient) and a complex
    coefficient array. Leading and trailing exact zeros are trimmed, so the
    zero sequence has no coefficients.
    """

    __slots__ = ("offset", "coeffs")

    def __init__(self, offset: int, coeffs):
        c = np.array(coeffs, dtype=complex).ravel()
        nz = np.flatnonzero(c)
        if nz.size == 0:
            offset, c = 0, c[:0]
        else:
            offset = int(offset) + int(nz[0])
            c = c[nz[0]:nz[-1] + 1]
        c.flags.writeable = False
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteSeq is immutable")

    def __reduce__(self):
        return (FiniteSeq, (self.offset, np.array(self.coeffs)))

    @classmethod
    def zero(cls) -> "FiniteSeq":
        return cls(0, [])

    @classmethod
    def atom(cls, k: int, value=1.0) -> "FiniteSeq":
        """``value * e_k``."""
        return cls(k, [value])

    @classmethod
    def from_mapping(cls, mapping) -> "FiniteSeq":
        if not mapping:
            return cls.zero()
        lo, hi = min(mapping), max(mapping)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for n, v in mapping.items():
            c[n - lo] += v
        return cls(lo, c)

    # structure -----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.coeffs) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + len(self.coeffs))

    def __getitem__(self, n: int) -> complex:
        i = int(n) - self.offset
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients over the window ``[lo, hi]``, zero-padded."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        if self.is_zero:
            return out
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeffs[a - self.lo:b - self.lo + 1]
        return out

    def items(self):
        return [(int(n), complex(v)) for n, v in zip(self.indices, self.coeffs) if v != 0]

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "FiniteSeq") -> "FiniteSeq":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return FiniteSeq(lo, self.dense(lo, hi) + other.dense(lo, hi))

    def __neg__(self) -> "FiniteSeq":
        return FiniteSeq(self.offset, -self.coeffs)

    def __sub__(self, other: "FiniteSeq") -> "FiniteSeq":
        return self + (-other)

    def __mul__(self, c) -> "FiniteSeq":
        return FiniteSeq(self.offset, self.coeffs * complex(c))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSeq):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.offset, self.coeffs.tobytes()))

    def allclose(self, other: "FiniteSeq", atol: float = 1e-12) -> bool:
        if self.is_zero and other.is_zero:
            return True
        lo = min(x.lo for x in (self, other) if not x.is_zero)
        hi = max(x.hi for x in (self, other) if not x.is_zero)
        return bool(np.allclose(self.dense(lo, hi), other.dense(lo, hi), rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"FiniteSeq(offset={self.offset}, coeffs={self.coeffs.tolist()})"

    # serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        return {"offset": self.offset,
                "coeffs": [[float(v.real), float(v.imag)] for v in self.coeffs]}

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteSeq":
        coeffs = [complex(*v) if isinstance(v, (list, tuple)) else complex(v)
                  for v in d["coeffs"]]
        return cls(int(d.get("offset", 0)), coeffs)


# ---------------------------------------------------------------------------
# norm families

_CONVEXITY_GRID = 2 ** 9


@dataclass(frozen=True)
class OrliczFunction:
    """Convex nondecreasing K on [0, inf) with K(0) = 0 and K(x) > 0 for x > 0.

    Either ``x**p`` or a piecewise-linear table over ``[0, xs[-1]]`` continued
    past the last node with the last slope (which keeps it convex).
    """

    p: float = None
    xs: tuple = ()
    ys: tuple = ()

    def __post_init__(self):
        if self.p is not None:
            if self.p < 1:
                raise ValueError("power Orlicz function needs p >= 1")
            return
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) < 2 or len(xs) != len(ys):
            raise ValueError("table Orlicz function needs matching xs, ys of length >= 2")
        if xs[0] != 0.0 or ys[0] != 0.0:
            raise ValueError("table Orlicz function must start at K(0) = 0")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("xs must be strictly increasing")
        if ys[1] <= 0:
            raise ValueError("K(x) must be positive for x > 0")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        g = np.linspace(0.0, xs[-1], _CONVEXITY_GRID)
        v = self(g)
        if np.any(np.diff(v) < -1e-12 * max(1.0, abs(v[-1]))):
            raise ValueError("Orlicz function must be nondecreasing")
        d2 = v[2:] - 2 * v[1:-1] + v[:-2]
        if np.any(d2 < -1e-10 * max(1.0, abs(v[-1]))):
            raise ValueError("Orlicz function must be convex")

    @classmethod
    def power(cls, p) -> "OrliczFunction":
        return cls(p=float(p))

    @classmethod
    def table(cls, xs, ys) -> "OrliczFunction":
        return cls(xs=tuple(xs), ys=tuple(ys))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.p is not None:
            return x ** self.p
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        inside = np.interp(x, xs, ys)
        return np.where(x > xs[-1], ys[-1] + slope * (x - xs[-1]), inside)

    def to_dict(self) -> dict:
        if self.p is not None:
            return {"kind": "power", "p": self.p}
        return {"kind": "table", "xs": list(self.xs), "ys": list(self.ys)}


@dataclass(frozen=True)
class ExponentRule:
    """Exponent sequence ``q(n)``: tabulated on ``[offset, offset+len(table))``,
    equal to ``base`` elsewhere."""

    base: float
    table: tuple = ()
    offset: int = 0

    def __post_init__(self):
        t = tuple(float(q) for q in self.table)
        if self.base < 1 or any(q < 1 for q in t):
            raise ValueError("variable exponent must satisfy q(n) >= 1")
        object.__setattr__(self, "table", t)

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.full(n.shape, float(self.base))
        if self.table:
            i = n - self.offset
            ok = (i >= 0) & (i < len(self.table))
            out[ok] = np.asarray(self.table)[i[ok]]
        return out


@dataclass(frozen=True)
class WeightedLp:
    p: float
    weight: WeightFamily

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("weighted lp needs p >= 1")


@dataclass(frozen=True)
class Orlicz:
    K: OrliczFunction
    weight: WeightFamily


@dataclass(frozen=True)
class VariableExponent:
    q: ExponentRule


NormFamily = Union[WeightedLp, Orlicz, VariableExponent]


@dataclass(frozen=True)
class SpaceSpec:
    """A Banach sequence space: the index domain plus a norm family."""

    domain: Domain
    norm: NormFamily

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        w = getattr(self.norm, "weight", None)
        if w is not None and w.domain is not self.domain:
            raise DomainError(
                f"weight lives on {w.domain.value} but space is {self.domain.value}")

    @classmethod
    def lp(cls, weight: WeightFamily = None, p: float = 2.0, domain=None) -> "SpaceSpec":
        """Weighted lp space; the domain defaults to the weight's domain."""
        if weight is None:
            weight = WeightFamily.constant(domain or Domain.BILATERAL)
        return cls(weight.domain if domain is None else domain, WeightedLp(float(p), weight))

    @property
    def weight(self) -> WeightFamily:
        """The weight, or the constant weight for variable-exponent spaces."""
        w = getattr(self.norm, "weight", None)
        return w if w is not None else WeightFamily.constant(self.domain)

    @property
    def is_hilbert(self) -> bool:
        return isinstance(self.norm, WeightedLp) and self.norm.p == 2

    def check_support(self, f: FiniteSeq) -> None:
        if self.domain is Domain.UNILATERAL and not f.is_zero and f.lo < 0:
            raise DomainError(f"support starts at {f.lo} but the space lives on Z+")


# ---------------------------------------------------------------------------
# norms

def _lp_norm(absvals: np.ndarray, logw: np.ndarray, p: float) -> float:
    # scale by the largest term so large weights do not overflow
    logt = np.log(absvals) + logw
    m = logt.max()
    if not np.isfinite(m):
        return math.inf
    with np.errstate(over="ignore"):
        return float(np.exp(m) * np.sum(np.exp(p * (logt - m))) ** (1.0 / p))


def _luxemburg(modular, t_lo: float, t_hi: float, rtol: float) -> float:
    """Smallest t with modular(t) <= 1, modular strictly decreasing in t."""
    for _ in range(5):
        if modular(t_hi) <= 1.0:
            break
        t_hi *= 10.0
    else:
        if modular(t_hi) > 1.0:
            raise ArithmeticError("could not bracket the Luxemburg norm from above")
    for _ in range(5):
        if modular(t_lo) > 1.0:
            break
        t_lo /= 10.0
    else:
        if modular(t_lo) <= 1.0:
            raise ArithmeticError("could not bracket the Luxemburg norm from below")
    while t_hi - t_lo > rtol * t_hi:
        mid = 0.5 * (t_lo + t_hi)
        if mid <= t_lo or mid >= t_hi:
            break
        if modular(mid) <= 1.0:
            t_hi = mid
        else:
            t_lo = mid
    return 0.5 * (t_lo + t_hi)


def space_norm(space: SpaceSpec, f: FiniteSeq, rtol: float = 1e-15) -> float:
    """Norm of a finitely supported sequence in ``space``.

    Weighted lp is evaluated directly. Orlicz and variable-exponent norms
    are the Luxemburg infimum, found by bisection on ``t`` until the bracket
    width is at most ``rtol * t_hi``.
    """
    space.check_support(f)
    if f.is_zero:
        return 0.0
    n = f.indices
    a = np.abs(f.coeffs)
    keep = a > 0
    n, a = n[keep], a[keep]
    norm = space.norm
    if isinstance(norm, WeightedLp):
        return _lp_norm(a, norm.weight.log_values(n), norm.p)
    if isinstance(norm, Orlicz):
        w = norm.weight.values(n)
        K = norm.K

        def modular(t):
            return float(np.sum(K(a / t) * w))

        t_hi = float(np.sum(a * np.maximum(1.0, w)))
        t_lo = float(a.max() * 1e-6 / (1.0 + w.max()))
    else:
        q = norm.q(n)

        def modular(t):
            return float(np.sum((a / t) ** q))

        t_hi = float(np.sum(a))
        t_lo = float(a.max() * 1e-6 / 2.0)
    return _luxemburg(modular, t_lo, t_hi, rtol)


def scale_seq(f: FiniteSeq, r: complex) -> FiniteSeq:
    """The sequence ``n -> f(n) * r**n`` on the same support window.

    Positive ``r`` is the radial scaling; unimodular ``r`` is the rotation
    under which the spaces are assumed invariant.
    """
    r = complex(r)
    if r == 0:
        raise ValueError("scaling factor must be nonzero")
    if f.is_zero:
        return f
    powers = np.array([r ** int(n) for n in f.indices], dtype=complex)
    return FiniteSeq(f.offset, f.coeffs * powers)

