"""Predicted spectral regions, membership queries and cloud distances."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import HypothesisViolation, PreconditionError
from .spaces import FiniteSeq, SpaceSpec
from .symbols import (DEFAULT_ANGULAR, DEFAULT_RADIAL, LaurentSymbol, PointCloud,
                      image_of_region)
from .weights import Domain, RadiusBracket, boundedness, spectral_radius_shift

__all__ = [
    "Annulus",
    "Disk",
    "Circle",
    "Cloud",
    "Image",
    "EQUALITY",
    "INCLUSION_ONLY",
    "predicted_sigma_shift",
    "predicted_sigma_unilateral",
    "predicted_sigma_multiplier",
    "predicted_sigma_toeplitz",
    "region_contains",
    "hausdorff",
    "INSIDE",
    "BOUNDARY",
    "OUTSIDE",
]

EQUALITY = "equality"
INCLUSION_ONLY = "inclusion-only"
INSIDE, BOUNDARY, OUTSIDE = "inside", "boundary", "outside"
_TRUNCATION_FACTOR = 4.0
_RADIUS_HORIZON = 64


def _ext(x: float):
    return "inf" if math.isinf(x) else float(x)


@dataclass(frozen=True)
class Annulus:
    rmin: float
    rmax: float
    truncation: float = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0 <= self.rmin <= self.rmax):
            raise ValueError(f"annulus needs 0 <= rmin <= rmax, got {self.rmin}, {self.rmax}")
        if math.isinf(self.rmax) and self.truncation is None:
            finite = self.rmin if self.rmin > 0 else 1.0
            object.__setattr__(self, "truncation", _TRUNCATION_FACTOR * finite)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.rmax)

    def to_dict(self) -> dict:
        return {"variant": "annulus", "rmin": _ext(self.rmin), "rmax": _ext(self.rmax),
                "truncation": self.truncation, **self.metadata}


@dataclass(frozen=True)
class Disk:
    r: float
    open: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    rmin = 0.0
    truncation = None

    @property
    def rmax(self) -> float:
        return self.r

    def to_dict(self) -> dict:
        return {"variant": "disk", "r": _ext(self.r), "open": self.open, **self.metadata}


@dataclass(frozen=True)
class Circle:
    r: float
    metadata: dict = field(default_factory=dict, compare=False)

    truncation = None

    def __post_init__(self):
        if not (0 < self.r < math.inf):
            raise ValueError("circle radius must be positive and finite")

    @property
    def rmin(self) -> float:
        return self.r

    @property
    def rmax(self) -> float:
        return self.r

    def to_dict(self) -> dict:
        return {"variant": "circle", "r": float(self.r), **self.metadata}


@dataclass(frozen=True)
class Cloud:
    cloud: PointCloud

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points

    def to_dict(self) -> dict:
        return {"variant": "cloud", "size": len(self.cloud), **self.cloud.metadata}


@dataclass(frozen=True)
class Image:
    """Closure of ``symbol(base)``, available as a sampled point cloud.

    ``relation`` says whether the prediction is the whole spectrum
    (``EQUALITY``) or only a subset of it (``INCLUSION_ONLY``).
    """

    symbol: LaurentSymbol
    base: object
    relation: str = EQUALITY
    radial: int = DEFAULT_RADIAL
    angular: int = DEFAULT_ANGULAR
    metadata: dict = field(default_factory=dict, compare=False)

    @cached_property
    def cloud(self) -> PointCloud:
        return image_of_region(self.symbol, self.base, self.radial, self.angular)

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points

    @property
    def pitch(self) -> float:
        """Largest gap between neighbouring samples along the angular grid."""
        pts = self.points.reshape(-1, self.angular)
        gaps = np.abs(np.diff(np.concatenate([pts, pts[:, :1]], axis=1), axis=1))
        return float(gaps.max())

    def to_dict(self) -> dict:
        return {"variant": "image", "relation": self.relation,
                "symbol": self.symbol.coeffs.to_dict(), "base": self.base.to_dict(),
                "grids": {"radial": self.radial, "angular": self.angular},
                "truncation": getattr(self.base, "truncation", None), **self.metadata}


# ---------------------------------------------------------------------------
# predictions

def _radii(space: SpaceSpec, horizon: int):
    fwd = spectral_radius_shift(space, "forward", horizon)
    bwd = spectral_radius_shift(space, "backward", horizon)
    return fwd, bwd


def _bracket_meta(fwd: RadiusBracket, bwd: RadiusBracket) -> dict:
    return {"rho_forward": [_ext(fwd.lower), _ext(fwd.upper)],
            "rho_backward": [_ext(bwd.lower), _ext(bwd.upper)]}


def predicted_sigma_shift(space: SpaceSpec, horizon: int = _RADIUS_HORIZON):
    """Spectrum of the bilateral shift: ``1/rho(S^-1) <= |z| <= rho(S)``.

    Returns a :class:`Circle` when the two radii coincide. An unbounded shift
    gives an infinite outer radius (or zero inner radius).
    """
    if space.domain is not Domain.BILATERAL:
        raise PreconditionError("predicted_sigma_shift needs a bilateral space")
    fb = boundedness(space, "forward").bounded
    bb = boundedness(space, "backward").bounded
    if not (fb or bb):
        raise HypothesisViolation("neither S nor S^-1 is bounded")
    fwd, bwd = _radii(space, horizon)
    rmax = fwd.upper
    rmin = 0.0 if math.isinf(bwd.upper) else 1.0 / bwd.upper
    meta = _bracket_meta(fwd, bwd)
    if math.isfinite(rmax) and rmin > 0 and abs(rmax - rmin) <= 1e-12 * rmax:
        return Circle(rmax, meta)
    return Annulus(rmin, rmax, metadata=meta)


def predicted_sigma_unilateral(space: SpaceSpec, direction="forward",
                               horizon: int = _RADIUS_HORIZON) -> Disk:
    """Closed disk ``|z| <= rho`` for the unilateral shift or backward shift."""
    if space.domain is not Domain.UNILATERAL:
        raise PreconditionError("predicted_sigma_unilateral needs a unilateral space")
    for d in ("forward", "backward"):
        if not boundedness(space, d).bounded:
            raise HypothesisViolation(f"the {d} unilateral shift is unbounded")
    fwd, bwd = _radii(space, horizon)
    br = fwd if direction == "forward" else bwd
    return Disk(br.upper, metadata=_bracket_meta(fwd, bwd))


def predicted_sigma_multiplier(phi: FiniteSeq, space: SpaceSpec,
                               radial: int = DEFAULT_RADIAL,
                               angular: int = DEFAULT_ANGULAR) -> Image:
    """Spectrum of ``M_phi``: the symbol image of the shift spectrum.

    ``M_phi`` lies in the norm-closed algebra generated by convolutions, so
    the image is the whole spectrum (relation ``EQUALITY``).
    """
    base = predicted_sigma_shift(space)
    return Image(LaurentSymbol(phi), base, EQUALITY, radial, angular)


def predicted_sigma_toeplitz(phi: FiniteSeq, space: SpaceSpec, side: str = "S",
                             radial: int = DEFAULT_RADIAL,
                             angular: int = DEFAULT_ANGULAR) -> Image:
    """Inner prediction for ``T_phi`` commuting with the shift or the backward shift.

    ``side="S"`` needs ``phi`` supported on Z+ and samples the symbol on the
    disk ``|z| <= rho(S)``. ``side="S-1"`` needs support on Z- and samples
    ``z -> phi~(1/z)`` on the disk ``|z| <= rho(S_-1)``, i.e. the power series
    in the backward shift. Only ``closure(image) subset sigma(T)`` is claimed.
    """
    if side not in ("S", "S-1"):
        raise ValueError("side must be 'S' or 'S-1'")
    if not phi.is_zero:
        if side == "S" and phi.lo < 0:
            raise PreconditionError("an operator commuting with S has symbol support in Z+")
        if side == "S-1" and phi.hi > 0:
            raise PreconditionError("an operator commuting with S_-1 has symbol support in Z-")
    direction = "forward" if side == "S" else "backward"
    disk = predicted_sigma_unilateral(space, direction)
    sym = LaurentSymbol(phi)
    if side == "S-1":
        sym = sym.reflected()
    meta = {"side": side, "variable": "z" if side == "S" else "1/z",
            "base_open": True}
    return Image(sym, disk, INCLUSION_ONLY, radial, angular, meta)


# ---------------------------------------------------------------------------
# membership and distances

def _points(x) -> np.ndarray:
    if isinstance(x, (Image, Cloud, PointCloud)):
        return x.points
    return np.asarray(x, dtype=complex).ravel()


def region_contains(region, lam: complex, tol: float = 1e-9) -> str:
    """Classify ``lam`` as inside, on the boundary of, or outside ``region``.

    Sampled regions use the distance to the nearest sample: ``<= tol`` is
    inside, ``<= 2 tol`` boundary. The answer is only as fine as the grid.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lam = complex(lam)
    if isinstance(region, Circle):
        return BOUNDARY if abs(abs(lam) - region.r) <= tol else OUTSIDE
    if isinstance(region, (Disk, Annulus)):
        r = abs(lam)
        if abs(r - region.rmax) <= tol or (region.rmin > 0 and abs(r - region.rmin) <= tol):
            return BOUNDARY
        return INSIDE if region.rmin <= r <= region.rmax else OUTSIDE
    pts = _points(region)
    d = float(np.min(np.abs(pts - lam)))
    if d <= tol:
        return INSIDE
    if d <= 2 * tol:
        return BOUNDARY
    return OUTSIDE


def _as_xy(pts: np.ndarray) -> np.ndarray:
    return np.column_stack([pts.real, pts.imag])


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point clouds in C."""
    pa, pb = _points(a), _points(b)
    if pa.size == 0 or pb.size == 0:
        raise ValueError("Hausdorff distance needs nonempty clouds")
    xa, xb = _as_xy(pa), _as_xy(pb)
    dab = cKDTree(xb).query(xa)[0].max()
    dba = cKDTree(xa).query(xb)[0].max()
    return float(max(dab, dba))
