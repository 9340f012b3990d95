"""Laurent-polynomial symbols: evaluation, circle suprema and region images."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, PoleError
from .spaces import FiniteSeq

__all__ = [
    "LaurentSymbol",
    "PointCloud",
    "CircleSup",
    "eval_symbol",
    "sup_on_circle",
    "image_of_region",
    "DEFAULT_ANGULAR",
    "DEFAULT_RADIAL",
]

DEFAULT_ANGULAR = 4096
DEFAULT_RADIAL = 257
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LaurentSymbol:
    """``z -> sum_n coeffs(n) z**n`` for a finitely supported coefficient sequence."""

    coeffs: FiniteSeq

    @classmethod
    def of(cls, phi) -> "LaurentSymbol":
        return phi if isinstance(phi, LaurentSymbol) else cls(phi)

    @property
    def has_negative_powers(self) -> bool:
        return not self.coeffs.is_zero and self.coeffs.lo < 0

    def __call__(self, z):
        return eval_symbol(self, z)

    def reflected(self) -> "LaurentSymbol":
        """Symbol of ``n -> coeffs(-n)``, i.e. ``z -> s(1/z)``."""
        c = self.coeffs
        if c.is_zero:
            return self
        return LaurentSymbol(FiniteSeq(-c.hi, c.coeffs[::-1]))

    def lipschitz_constant(self, r: float) -> float:
        """Bound on ``|d/dtheta s(r e^{i theta})|``."""
        c = self.coeffs
        if c.is_zero:
            return 0.0
        n = c.indices.astype(float)
        return float(np.sum(np.abs(n) * np.abs(c.coeffs) * r ** n))


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def eval_symbol(s, z):
    """Evaluate a Laurent symbol at ``z`` (scalar or array).

    Nonnegative and negative powers are Horner-evaluated separately.
    """
    s = LaurentSymbol.of(s)
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    c = s.coeffs
    if c.is_zero:
        out = np.zeros_like(z)
        return complex(out) if scalar else out
    if c.lo < 0 and np.any(z == 0):
        raise PoleError("symbol with negative powers evaluated at z = 0")
    n = c.indices
    pos = c.coeffs[n >= 0]
    neg = c.coeffs[n < 0]
    out = np.zeros_like(z)
    if pos.size:
        # powers lo_pos .. hi
        lo_pos = max(c.lo, 0)
        out = out + _horner(pos, z) * z ** lo_pos
    if neg.size:
        # coefficients for z^-1, z^-2, ... in increasing order of |n|
        hi_neg = min(c.hi, -1)
        rev = neg[::-1]
        w = 1.0 / z
        out = out + _horner(rev, w) * w ** (-hi_neg)
    return complex(out) if scalar else out


class CircleSup(NamedTuple):
    value: float
    slack: float
    theta: float


def sup_on_circle(s, r: float, m: int = DEFAULT_ANGULAR) -> CircleSup:
    """Maximum of ``|s|`` on the circle of radius ``r``.

    Grid maximum over ``m`` equally spaced angles, refined by a golden-section
    search in the two grid cells around the argmax. ``slack`` bounds the
    distance from the reported value to the true supremum through the
    Lipschitz constant of ``theta -> s(r e^{i theta})``.
    """
    s = LaurentSymbol.of(s)
    if r <= 0:
        raise ValueError("radius must be positive")
    if m < 16:
        raise ValueError("grid size must be at least 16")
    h = 2.0 * math.pi / m
    theta = np.arange(m) * h
    vals = np.abs(eval_symbol(s, r * np.exp(1j * theta)))
    i = int(np.argmax(vals))

    def f(t):
        return abs(eval_symbol(s, r * complex(math.cos(t), math.sin(t))))

    a, b = theta[i] - h, theta[i] + h
    x1, x2 = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(60):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    best, t_best = float(vals[i]), float(theta[i])
    for t, v in ((x1, f1), (x2, f2)):
        if v > best:
            best, t_best = v, t
    slack = s.lipschitz_constant(r) * h / 2.0
    return CircleSup(best, slack, t_best % (2.0 * math.pi))


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size == 0:
            raise ValueError("point cloud must be nonempty")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("re,im\n")
            for p in self.points:
                fh.write(f"{float(p.real)!r},{float(p.imag)!r}\n")


def _radial_grid(rmin: float, rmax: float, count: int) -> np.ndarray:
    if rmin == rmax or count <= 1:
        return np.array([rmax])
    return np.linspace(rmin, rmax, count)


def image_of_region(s, region, radial: int = DEFAULT_RADIAL,
                    angular: int = DEFAULT_ANGULAR) -> PointCloud:
    """Sample ``s`` over a circle, disk or annulus on a polar tensor grid.

    Unbounded annuli need a ``truncation`` radius; the truncation and grid
    sizes are recorded in the cloud metadata.
    """
    s = LaurentSymbol.of(s)
    rmin, rmax = region.rmin, region.rmax
    truncation = getattr(region, "truncation", None)
    if math.isinf(rmax):
        if truncation is None:
            raise ConfigError("unbounded region needs a radial truncation before sampling")
        rmax = float(truncation)
    if rmin == 0.0 and s.has_negative_powers:
        # the origin is a pole; start the radial grid one step out
        rmin = rmax / max(radial - 1, 1)
    radii = _radial_grid(rmin, rmax, radial)
    theta = 2.0 * math.pi * np.arange(angular) / angular
    z = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    pts = eval_symbol(s, z)
    meta = {"radial": int(radii.size), "angular": int(angular),
            "rmin": float(radii[0]), "rmax": float(radii[-1]),
            "truncation": truncation}
    return PointCloud(pts, meta)
