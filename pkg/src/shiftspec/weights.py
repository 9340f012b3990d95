"""Weight families on Z and Z+, shift-power norms and shift spectral radii.

Infinite quantities (an unbounded shift, an infinite spectral radius) are
plain ``math.inf`` floats.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, UnsupportedNormError

__all__ = [
    "Domain",
    "WeightFamily",
    "RadiusBracket",
    "WindowedSup",
    "BoundednessReport",
    "eval_weight",
    "shift_norm",
    "log_shift_norm",
    "windowed_shift_norm",
    "spectral_radius_shift",
    "boundedness",
    "DEFAULT_WINDOW",
]

DEFAULT_WINDOW = 1024
# divergence rule: ratio above 1e12 with an increasing trend over this many points
_DIVERGENCE_LOG = math.log(1e12)
_TREND_POINTS = 64


class Domain(str, enum.Enum):
    BILATERAL = "bilateral"
    UNILATERAL = "unilateral"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def _direction_sign(direction) -> int:
    d = Direction(direction)
    return 1 if d is Direction.FORWARD else -1


@dataclass(frozen=True)
class WeightFamily:
    """A positive weight on Z or Z+.

    Use the classmethod constructors rather than building instances by hand:
    ``constant``, ``geometric``, ``two_sided_exp``, ``polynomial``,
    ``piecewise_super_exp`` and ``table``.
    """

    kind: str
    domain: Domain = Domain.BILATERAL
    a: float = 1.0
    alpha: float = 0.0
    s: float = 0.0
    entries: tuple = ()
    offset: int = 0
    tail: str = "constant"
    tail_ratio: float = 1.0
    _kinds = ("constant", "geometric", "two_sided_exp", "polynomial",
              "piecewise_super_exp", "table")

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        if self.kind not in self._kinds:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "geometric" and not self.a > 0:
            raise ValueError("geometric ratio must be positive")
        if self.kind == "table":
            if not self.entries:
                raise ValueError("table weight needs at least one entry")
            ent = tuple(float(e) for e in self.entries)
            if any(not (e > 0 and math.isfinite(e)) for e in ent):
                raise ValueError("table entries must be positive and finite")
            object.__setattr__(self, "entries", ent)
            if self.tail not in ("constant", "geometric"):
                raise ValueError("tail must be 'constant' or 'geometric'")
            if self.tail == "constant":
                object.__setattr__(self, "tail_ratio", 1.0)
            elif not self.tail_ratio > 0:
                raise ValueError("geometric tail ratio must be positive")
            if self.domain is Domain.UNILATERAL and self.offset < 0:
                raise DomainError("unilateral table cannot start at a negative index")

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, domain=Domain.BILATERAL):
        return cls("constant", domain)

    @classmethod
    def geometric(cls, a, domain=Domain.BILATERAL):
        return cls("geometric", domain, a=float(a))

    @classmethod
    def two_sided_exp(cls, alpha, domain=Domain.BILATERAL):
        return cls("two_sided_exp", domain, alpha=float(alpha))

    @classmethod
    def polynomial(cls, s, domain=Domain.BILATERAL):
        return cls("polynomial", domain, s=float(s))

    @classmethod
    def piecewise_super_exp(cls, domain=Domain.BILATERAL):
        """exp(n**2) for n >= 0 and 1 for n < 0."""
        return cls("piecewise_super_exp", domain)

    @classmethod
    def table(cls, entries, offset=0, tail="constant", tail_ratio=1.0,
              domain=Domain.BILATERAL):
        """Tabulated weight on ``[offset, offset + len(entries))``.

        Outside the table the weight continues from the nearest stored entry
        either as a constant or geometrically, ``w(n) = edge * tail_ratio**(n - edge_index)``.
        """
        return cls("table", domain, entries=tuple(entries), offset=int(offset),
                   tail=tail, tail_ratio=float(tail_ratio))

    # evaluation --------------------------------------------------------
    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.entries) - 1

    def _check(self, n: np.ndarray) -> None:
        if self.domain is Domain.UNILATERAL and np.any(n < 0):
            raise DomainError(f"negative index for a weight on Z+: {int(n.min())}")

    def log_values(self, n) -> np.ndarray:
        """Natural log of the weight at integer indices ``n`` (vectorized)."""
        n = np.asarray(n, dtype=np.int64)
        self._check(n)
        nf = n.astype(float)
        k = self.kind
        if k == "constant":
            return np.zeros_like(nf)
        if k == "geometric":
            return nf * math.log(self.a)
        if k == "two_sided_exp":
            return self.alpha * np.abs(nf)
        if k == "polynomial":
            return self.s * np.log1p(np.abs(nf))
        if k == "piecewise_super_exp":
            return np.where(n >= 0, nf * nf, 0.0)
        # table
        logs = np.log(np.asarray(self.entries))
        lr = math.log(self.tail_ratio)
        idx = np.clip(n - self.lo, 0, len(self.entries) - 1)
        out = logs[idx]
        out = np.where(n > self.hi, logs[-1] + (nf - self.hi) * lr, out)
        out = np.where(n < self.lo, logs[0] + (nf - self.lo) * lr, out)
        return out

    def values(self, n) -> np.ndarray:
        """Weight values at integer indices ``n`` (vectorized)."""
        n = np.asarray(n, dtype=np.int64)
        self._check(n)
        k = self.kind
        if k == "constant":
            return np.ones(n.shape)
        if k == "geometric":
            return self.a ** n.astype(float)
        if k == "polynomial":
            return (1.0 + np.abs(n).astype(float)) ** self.s
        out = np.exp(self.log_values(n))
        if k == "table":
            # stored entries are returned verbatim, not via exp(log(.))
            inside = (n >= self.lo) & (n <= self.hi)
            out = np.where(inside, np.asarray(self.entries)[np.clip(n - self.lo, 0, len(self.entries) - 1)], out)
        return out

    def __call__(self, n):
        return eval_weight(self, n)

    def tail_rate(self, sign: int) -> float:
        """Per-step ratio w(n+sign)/w(n) far out in the tails of a table."""
        return self.tail_ratio ** sign

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "domain": self.domain.value}
        if self.kind == "geometric":
            d["a"] = self.a
        elif self.kind == "two_sided_exp":
            d["alpha"] = self.alpha
        elif self.kind == "polynomial":
            d["s"] = self.s
        elif self.kind == "table":
            d.update(entries=list(self.entries), offset=self.offset,
                     tail=self.tail, tail_ratio=self.tail_ratio)
        return d

    @classmethod
    def from_dict(cls, d: dict, domain=None):
        d = dict(d)
        kind = d.pop("kind")
        dom = d.pop("domain", None) or domain or Domain.BILATERAL
        if kind == "geometric":
            return cls.geometric(d["a"], dom)
        if kind == "two_sided_exp":
            return cls.two_sided_exp(d["alpha"], dom)
        if kind == "polynomial":
            return cls.polynomial(d["s"], dom)
        if kind == "table":
            return cls.table(d["entries"], d.get("offset", 0), d.get("tail", "constant"),
                             d.get("tail_ratio", 1.0), dom)
        if kind in ("constant", "piecewise_super_exp"):
            return cls(kind, dom)
        raise ValueError(f"unknown weight kind {kind!r}")


def eval_weight(w: WeightFamily, n: int) -> float:
    """Value of the weight at a single index."""
    return float(w.values(np.array([int(n)]))[0])


# ---------------------------------------------------------------------------
# shift norms

def _lp_weight(space) -> WeightFamily:
    from .spaces import WeightedLp

    if not isinstance(space.norm, WeightedLp):
        raise UnsupportedNormError(
            f"shift norms are only available on weighted lp spaces, "
            f"not {type(space.norm).__name__}")
    return space.norm.weight


def _closed_shift_norm(w: WeightFamily, domain: Domain, k: int) -> float:
    bil = domain is Domain.BILATERAL
    kind = w.kind
    if kind == "constant":
        return 1.0
    if kind == "geometric":
        return w.a ** k
    if kind == "two_sided_exp":
        return math.exp(abs(w.alpha) * abs(k)) if bil else math.exp(w.alpha * k)
    if kind == "polynomial":
        if bil or w.s * k > 0:
            return (1.0 + abs(k)) ** abs(w.s)
        return 1.0
    if kind == "piecewise_super_exp":
        if k > 0:
            return math.inf
        return 1.0 if bil else math.exp(-float(k) * k)
    # table: exact via the window where the table matters plus the tail ratio
    lo = w.lo - abs(k) - 1
    hi = w.hi + abs(k) + 1
    if not bil:
        lo = max(lo, 0, -k)
    n = np.arange(lo, hi + 1)
    logs = w.log_values(n + k) - w.log_values(n)
    return float(max(np.exp(logs.max()), w.tail_rate(1) ** k))


def shift_norm(space, k: int) -> float:
    """Operator norm of the k-th shift power on a weighted lp space.

    Equals ``sup_n w(n+k)/w(n)``, the sup running over ``n`` with both
    ``n`` and ``n+k`` in the domain. Negative ``k`` is the backward direction
    (``S_{-1}^{|k|}`` on Z+). Returns ``inf`` when the shift is unbounded.
    """
    w = _lp_weight(space)
    k = int(k)
    if k == 0:
        return 1.0
    try:
        return float(_closed_shift_norm(w, space.domain, k))
    except OverflowError:
        return math.inf


def log_shift_norm(space, k: int) -> float:
    """``log ||S^k||``, finite for shift powers too large to represent."""
    w = _lp_weight(space)
    k = int(k)
    bil = space.domain is Domain.BILATERAL
    if k == 0:
        return 0.0
    kind = w.kind
    if kind == "constant":
        return 0.0
    if kind == "geometric":
        return k * math.log(w.a)
    if kind == "two_sided_exp":
        return abs(w.alpha) * abs(k) if bil else w.alpha * k
    if kind == "polynomial":
        return abs(w.s) * math.log1p(abs(k)) if (bil or w.s * k > 0) else 0.0
    if kind == "piecewise_super_exp":
        if k > 0:
            return math.inf
        return 0.0 if bil else -float(k) * k
    lo = w.lo - abs(k) - 1
    hi = w.hi + abs(k) + 1
    if not bil:
        lo = max(lo, 0, -k)
    n = np.arange(lo, hi + 1)
    logs = w.log_values(n + k) - w.log_values(n)
    return float(max(logs.max(), k * math.log(w.tail_rate(1))))


class WindowedSup(NamedTuple):
    value: float
    status: str  # "converged" | "window-limited" | "divergent"
    argmax: int
    last_log_ratios: tuple


def _unbounded_tail(w: WeightFamily, k: int) -> bool:
    return w.kind == "piecewise_super_exp" and k > 0


def windowed_shift_norm(space, k: int, window: int = DEFAULT_WINDOW) -> WindowedSup:
    """Brute-force ``sup w(n+k)/w(n)`` over ``|n| <= window``.

    Independent of the closed forms used by :func:`shift_norm`; this is the
    oracle they are checked against. Log-ratios are used so super-exponential
    weights do not overflow.
    """
    w = _lp_weight(space)
    k = int(k)
    lo = -window if space.domain is Domain.BILATERAL else max(0, -k)
    n = np.arange(lo, window + 1)
    if space.domain is Domain.UNILATERAL:
        n = n[n + k >= 0]
    logs = w.log_values(n + k) - w.log_values(n)
    tail = logs[-_TREND_POINTS:]
    i = int(np.argmax(logs))
    last = tuple(float(x) for x in tail[-8:])
    increasing = bool(np.all(np.diff(tail) > 0))
    if increasing and tail[-1] > _DIVERGENCE_LOG and _unbounded_tail(w, k):
        return WindowedSup(math.inf, "divergent", int(n[-1]), last)
    value = float(np.exp(logs[i]))
    status = "window-limited" if increasing and i == len(logs) - 1 else "converged"
    return WindowedSup(value, status, int(n[i]), last)


# ---------------------------------------------------------------------------
# spectral radii

@dataclass(frozen=True)
class RadiusBracket:
    lower: float
    upper: float
    norms: tuple = field(default=(), compare=False)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> float:
        """Point estimate: the upper end, which is a certified bound."""
        return self.upper


def _closed_radius(w: WeightFamily, domain: Domain, sign: int):
    bil = domain is Domain.BILATERAL
    kind = w.kind
    if kind in ("constant", "polynomial"):
        return 1.0
    if kind == "geometric":
        return w.a ** sign
    if kind == "two_sided_exp":
        return math.exp(abs(w.alpha)) if bil else math.exp(sign * w.alpha)
    if kind == "piecewise_super_exp":
        if sign > 0:
            return math.inf
        return 1.0 if bil else 0.0
    return None


def spectral_radius_shift(space, direction="forward", horizon: int = 64) -> RadiusBracket:
    """Bracket the spectral radius of the forward or backward shift.

    The upper end is ``min_{n <= horizon} ||S^n||^(1/n)`` (valid for every
    ``n`` by submultiplicativity). Closed-form families collapse the bracket
    to the exact value; table weights use the tail ratio as the lower end,
    since ``||S^n||`` is at least the tail ratio to the n-th power.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    w = _lp_weight(space)
    sign = _direction_sign(direction)
    norms = tuple(shift_norm(space, sign * n) for n in range(1, horizon + 1))
    if math.isinf(norms[0]):
        return RadiusBracket(math.inf, math.inf, norms)
    upper = min(nm ** (1.0 / n) for n, nm in enumerate(norms, start=1))
    closed = _closed_radius(w, space.domain, sign)
    if closed is not None:
        return RadiusBracket(closed, closed, norms)
    lower = min(w.tail_rate(sign), upper)
    return RadiusBracket(lower, upper, norms)


class BoundednessReport(NamedTuple):
    bounded: bool
    sup_ratio: float
    argmax: int
    evidence: tuple  # trailing log-ratios from the windowed scan


def boundedness(space, direction="forward", window: int = DEFAULT_WINDOW) -> BoundednessReport:
    """Decide whether the forward/backward shift is bounded.

    Bounded iff ``shift_norm(space, +-1)`` is finite; the windowed scan
    supplies the witness index (or the divergent ratio sequence).
    """
    sign = _direction_sign(direction)
    norm = shift_norm(space, sign)
    scan = windowed_shift_norm(space, sign, window)
    return BoundednessReport(math.isfinite(norm), norm, scan.argmax, scan.last_log_ratios)
