"""Numerical witnesses tying predicted regions to actual spectra.

Three kinds of evidence are produced:

* approximate eigenvectors (truncated ``z**-n``) whose residual tends to zero,
  witnessing points of the approximate point spectrum;
* growth of ``||(A_N - lam)^-1 e_0||`` along finite sections, witnessing
  interior points where the formal solution leaves the space;
* constructed bounded inverses (Laurent or Neumann series with summable
  weighted coefficients), certifying that ``lam`` is outside the spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import HypothesisViolation, PreconditionError, UnsupportedNormError
from .operators import (OperatorSpec, apply_operator, convolve, finite_section,
                        operator_norm_bracket, project_plus, symbol_norm_upper)
from .spaces import FiniteSeq, SpaceSpec, scale_seq, space_norm
from .spectra import (BOUNDARY, INSIDE, OUTSIDE, predicted_sigma_shift,
                      predicted_sigma_unilateral)
from .symbols import LaurentSymbol, eval_symbol, sup_on_circle
from .weights import Domain, log_shift_norm, shift_norm, spectral_radius_shift

__all__ = [
    "Certificate",
    "GrowthTable",
    "INSIDE_WITNESS",
    "BLOWUP_WITNESS",
    "OUTSIDE_BOUND",
    "INCONCLUSIVE",
    "approx_eigen_residual",
    "inside_witness",
    "blowup_witness",
    "laurent_coefficients",
    "outside_certificate",
    "toeplitz_outside_certificate",
    "neumann_outside_certificate",
    "check_symbol_bound",
    "check_scaling_identity",
    "verify_point",
]

INSIDE_WITNESS = "inside-witness"
BLOWUP_WITNESS = "blowup-witness"
OUTSIDE_BOUND = "outside-bound"
INCONCLUSIVE = "inconclusive"

IDENTITY_TOL = 1e-8
TAIL_TOL = 1e-6
DELTA_FRACTION = 1e-3
PIVOT_TOL = 1e-14
_CHECK_GRID = 4096
_SIGNIFICANT = 1e-12


@dataclass
class Certificate:
    """A verdict together with the numbers that produced it."""

    verdict: str
    evidence: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def outside(self) -> bool:
        return self.verdict == OUTSIDE_BOUND

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "evidence": self.evidence, "params": self.params}
        if self.reason:
            d["reason"] = self.reason
        return d


def _inconclusive(reason: str, params: dict, **evidence) -> Certificate:
    return Certificate(INCONCLUSIVE, evidence, params, reason)


# ---------------------------------------------------------------------------
# approximate eigenvectors

def _window(op: OperatorSpec, N: int):
    return (0, N) if op.unilateral else (-N, N)


def approx_eigen_residual(op: OperatorSpec, z: complex, N: int) -> float:
    """Relative residual ``||op f - mu f|| / ||f||`` for ``f(n) = z**-n`` on the window.

    ``mu`` is the symbol of ``op`` at ``z``. Boundary terms of the truncation
    are what remains, so the residual decays like ``N**-1/2`` on circles in
    the shift spectrum.
    """
    if not op.space.is_hilbert:
        raise UnsupportedNormError("eigenvector residuals are computed on weighted l2")
    lo, hi = _window(op, N)
    z = complex(z)
    f = FiniteSeq(lo, z ** -np.arange(lo, hi + 1, dtype=float))
    mu = eval_symbol(op.phi, z)
    r = apply_operator(op, f) - f * mu
    return space_norm(op.space, r) / space_norm(op.space, f)


def inside_witness(op: OperatorSpec, z: complex, Ns: Sequence[int], tol: float = 0.2) -> Certificate:
    """Residual table over ``Ns``; an InsideWitness when the last residual is below ``tol``."""
    mu = eval_symbol(op.phi, complex(z))
    table = {int(N): approx_eigen_residual(op, z, N) for N in Ns}
    params = {"z": [complex(z).real, complex(z).imag], "Ns": [int(N) for N in Ns], "tol": tol}
    ev = {"mu": [mu.real, mu.imag], "residuals": table}
    last = table[max(table)]
    if last <= tol:
        return Certificate(INSIDE_WITNESS, ev, params)
    return Certificate(INCONCLUSIVE, ev, params, f"residual {last:.3g} above {tol}")


# ---------------------------------------------------------------------------
# resolvent blow-up along sections

class GrowthTable(NamedTuple):
    Ns: tuple
    norms: tuple

    def rows(self):
        return list(zip(self.Ns, self.norms))

    @property
    def monotone(self) -> bool:
        return all(b > a for a, b in zip(self.norms, self.norms[1:]))

    def step_factors(self) -> list:
        """Growth per unit of N between consecutive entries."""
        out = []
        for (n0, v0), (n1, v1) in zip(self.rows(), self.rows()[1:]):
            if math.isinf(v0) or math.isinf(v1) or v0 == 0:
                out.append(math.inf if math.isinf(v1) else math.nan)
            else:
                out.append((v1 / v0) ** (1.0 / (n1 - n0)))
        return out


def _is_lower_triangular(A: np.ndarray) -> bool:
    return not np.any(np.triu(A, 1))


def _is_upper_triangular(A: np.ndarray) -> bool:
    return not np.any(np.tril(A, -1))


def _solve_section(A: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
    scale = max(float(np.max(np.abs(A))), 1.0)
    if _is_lower_triangular(A) or _is_upper_triangular(A):
        d = np.abs(np.diag(A))
        if d.min() < PIVOT_TOL * scale:
            return None
        return sla.solve_triangular(A, rhs, lower=_is_lower_triangular(A))
    lu, piv = sla.lu_factor(A, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        return None
    return sla.lu_solve((lu, piv), rhs)


def blowup_witness(op: OperatorSpec, lam: complex, Ns: Sequence[int]) -> GrowthTable:
    """``N -> ||(A_N - lam I)^-1 e_0||`` in the space norm.

    Singular sections record ``inf``. An increasing, unbounded table is the
    numerical trace of ``(S - lam) g = e_0`` having no solution in the space.
    """
    norms = []
    lam = complex(lam)
    for N in Ns:
        sec = finite_section(op, N)
        A = sec.matrix - lam * np.eye(sec.size)
        rhs = np.zeros(sec.size, dtype=complex)
        i0 = int(np.flatnonzero(sec.indices == 0)[0])
        rhs[i0] = math.exp(float(op.space.norm.weight.log_values([0])[0]))
        x = _solve_section(A, rhs)
        norms.append(math.inf if x is None else float(np.linalg.norm(x)))
    return GrowthTable(tuple(int(N) for N in Ns), tuple(norms))


def blowup_certificate(op: OperatorSpec, lam: complex, Ns: Sequence[int],
                       min_factor: float = 1.0 + 1e-3) -> Certificate:
    table = blowup_witness(op, lam, Ns)
    factors = table.step_factors()
    params = {"lambda": [complex(lam).real, complex(lam).imag], "Ns": list(table.Ns)}
    ev = {"growth": [[n, v] for n, v in table.rows()], "step_factors": factors}
    if table.monotone and all(f >= min_factor for f in factors):
        return Certificate(BLOWUP_WITNESS, ev, params)
    return Certificate(INCONCLUSIVE, ev, params, "section resolvents do not grow")


# ---------------------------------------------------------------------------
# Laurent inversion

def _check_radii(rm: float, rp: float, m_circles: int = 10) -> np.ndarray:
    if rm == rp:
        return np.array([rp])
    if rm > 0:
        return np.geomspace(rm, rp, m_circles)
    return np.linspace(rp / m_circles, rp, m_circles)


def _min_distance(sym: LaurentSymbol, lam: complex, radii: np.ndarray, m: int):
    """Lower bound on ``min |sym - lam|`` over the circles, and ``max |sym|``.

    The grid minimum is lowered by the Lipschitz slack of half a grid step.
    """
    theta = 2 * math.pi * np.arange(m) / m
    circ = np.exp(1j * theta)
    dmin, smax = math.inf, 0.0
    for r in radii:
        v = eval_symbol(sym, r * circ)
        slack = sym.lipschitz_constant(r) * math.pi / m
        dmin = min(dmin, float(np.min(np.abs(v - lam))) - slack)
        smax = max(smax, float(np.max(np.abs(v))))
    return dmin, smax


class _Transform(NamedTuple):
    """Circle-transform data: ``c_k = F_k * exp(-k * logr_k)``."""

    k: np.ndarray
    F: np.ndarray
    logr: np.ndarray

    def scaled(self, r: float) -> FiniteSeq:
        """``k -> c_k r**k``; bounded when ``r`` lies between the transform radii."""
        with np.errstate(over="ignore", invalid="ignore"):
            vals = self.F * np.exp(self.k * (math.log(r) - self.logr))
        return FiniteSeq(int(self.k[0]), vals)

    def coefficients(self) -> FiniteSeq:
        with np.errstate(over="ignore", invalid="ignore"):
            return FiniteSeq(int(self.k[0]), self.F * np.exp(-self.k * self.logr))

    def weighted_terms(self, space: SpaceSpec, sign: int = 1) -> np.ndarray:
        """``|c_k| * ||S^(sign k)||`` evaluated in logs."""
        ln = np.array([log_shift_norm(space, sign * int(j)) for j in self.k])
        a = np.abs(self.F)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            t = np.where(a == 0, 0.0, a * np.exp(ln - self.k * self.logr))
        return t


def _circle_transform(g, r_minus: float, r_plus: float, m: int) -> _Transform:
    theta = 2 * math.pi * np.arange(m) / m
    circ = np.exp(1j * theta)
    k = np.arange(-(m // 2), m // 2)
    F_out = np.fft.fft(g(r_plus * circ)) / m
    F_in = np.fft.fft(g(r_minus * circ)) / m if r_minus != r_plus else F_out
    pos = k >= 0
    F = np.where(pos, F_out[k % m], F_in[k % m])
    logr = np.where(pos, math.log(r_plus), math.log(r_minus))
    return _Transform(k, F, logr)


def laurent_coefficients(g, r_minus: float, r_plus: float, m: int) -> FiniteSeq:
    """Laurent coefficients of ``g`` on the annulus ``r_minus <= |z| <= r_plus``.

    Indices ``k >= 0`` come from the m-point transform on the outer circle,
    ``k < 0`` from the inner circle; the result covers ``[-m/2, m/2)``.
    """
    return _circle_transform(g, r_minus, r_plus, m).coefficients()


def _side_tail(terms: np.ndarray, scale: float = None):
    """Decay ratio and extrapolated tail for terms ordered outward from the centre.

    Terms below ``1e-12 * scale`` (default: the largest term) are treated as
    round-off. Returns ``(q, tail)`` or ``(q, inf)`` when the terms do not decay.
    """
    if terms.size == 0:
        return 0.0, 0.0
    tmax = float(np.max(terms))
    if not math.isfinite(tmax):
        return math.inf, math.inf
    scale = tmax if scale is None else scale
    sig = np.flatnonzero(terms > _SIGNIFICANT * scale)
    if sig.size == 0:
        return 0.0, 0.0
    last = int(sig[-1])
    first = int(np.argmax(terms[:last + 1]))
    if last == terms.size - 1:
        return 1.0, math.inf
    if last == first:
        # single significant term followed by round-off
        return 0.0, float(terms[last]) * _SIGNIFICANT
    q = (terms[last] / terms[first]) ** (1.0 / (last - first))
    if q >= 1.0:
        return float(q), math.inf
    return float(q), float(terms[last] * q / (1.0 - q))


def _identity_residual(c: FiniteSeq, psi: FiniteSeq) -> float:
    """Max deviation of ``c * psi`` from ``e_0`` where truncation of ``c`` is invisible."""
    prod = convolve(c, psi)
    lo, hi = c.lo + psi.hi, c.hi + psi.lo
    if lo > hi:
        return math.inf
    vals = prod.dense(lo, hi)
    target = np.zeros_like(vals)
    if lo <= 0 <= hi:
        target[-lo] = 1.0
    return float(np.max(np.abs(vals - target)))


def _bound_from_terms(idx: np.ndarray, t: np.ndarray):
    B = float(np.sum(t))
    scale = float(np.max(t))
    q_pos, tail_pos = _side_tail(t[idx >= 0], scale)
    q_neg, tail_neg = _side_tail(t[idx < 0][::-1], scale)
    return B, q_pos, q_neg, tail_pos + tail_neg


def outside_certificate(phi: FiniteSeq, lam: complex, space: SpaceSpec,
                        radii: tuple = None, m: int = 256,
                        tail_tol: float = TAIL_TOL, max_m: int = 8192) -> Certificate:
    """Certify ``lam`` outside the spectrum of ``M_phi`` by building ``(M_phi - lam)^-1``.

    Steps: (i) ``|phi~ - lam| >= delta`` on ten circles spanning the radii;
    (ii) Laurent coefficients of ``1 / (phi~ - lam)`` by the two-circle
    transform; (iii) the convolution identity ``c * (phi - lam e_0) = e_0`` is
    checked on the window; (iv) ``B = sum |c_k| ||S^k||`` plus an extrapolated
    geometric tail. A finite ``B`` bounds the inverse. When the coefficients
    have not decayed inside the window the transform size is doubled, up to
    ``max_m``.
    """
    if space.domain is not Domain.BILATERAL:
        raise PreconditionError("outside_certificate needs a bilateral space")
    if m < 256 or m & (m - 1):
        raise PreconditionError("transform size must be a power of two >= 256")
    region = predicted_sigma_shift(space)
    rlo, rhi = region.rmin, region.rmax
    if radii is None:
        radii = (rlo, rhi if math.isfinite(rhi) else region.truncation)
    rm, rp = float(radii[0]), float(radii[1])
    if not (rlo * (1 - 1e-12) <= rm <= rp <= rhi * (1 + 1e-12)) or rm <= 0:
        raise PreconditionError(f"radii ({rm}, {rp}) are not inside [{rlo}, {rhi}]")
    lam = complex(lam)
    sym = LaurentSymbol(phi)
    params = {"lambda": [lam.real, lam.imag], "radii": [rm, rp], "m": m,
              "phi": phi.to_dict(), "tail_tol": tail_tol}

    delta, smax = _min_distance(sym, lam, _check_radii(rm, rp), _CHECK_GRID)
    if delta < DELTA_FRACTION * max(smax, abs(lam)):
        return _inconclusive("symbol comes within delta of lambda", params, delta=delta)

    def g(z):
        return 1.0 / (eval_symbol(sym, z) - lam)

    size = m
    while True:
        tr = _circle_transform(g, rm, rp, size)
        # the identity is invariant under n -> r**n scaling; a central radius
        # keeps the scaled coefficients bounded
        rc = math.sqrt(rm * rp)
        psi = phi - FiniteSeq.atom(0, lam)
        ident = _identity_residual(tr.scaled(rc), scale_seq(psi, rc))
        if not ident <= IDENTITY_TOL:
            return _inconclusive("convolution identity fails on the window", params,
                                 delta=delta, identity_residual=ident)
        B, q_pos, q_neg, tail = _bound_from_terms(tr.k, tr.weighted_terms(space))
        if (math.isfinite(B) and tail < tail_tol) or size >= max_m:
            break
        # coefficients had not decayed within the window; refine the transform
        size *= 2
    params["m"] = size
    ev = {"delta": delta, "identity_residual": ident, "B": B + tail, "B_partial": B,
          "tail": tail, "decay_ratio": {"positive": q_pos, "negative": q_neg},
          "scaled_coefficients": {"radius": rc, **tr.scaled(rc).to_dict()}}
    if not math.isfinite(B) or not tail < tail_tol:
        return Certificate(INCONCLUSIVE, ev, params, "weighted coefficient sum not certified finite")
    return Certificate(OUTSIDE_BOUND, ev, params)


def _winding_number(values: np.ndarray) -> int:
    ph = np.unwrap(np.angle(np.concatenate([values, values[:1]])))
    return int(round((ph[-1] - ph[0]) / (2 * math.pi)))


def toeplitz_outside_certificate(phi: FiniteSeq, lam: complex, space: SpaceSpec,
                                 side: str = "S", m: int = 256,
                                 tail_tol: float = TAIL_TOL, max_m: int = 8192) -> Certificate:
    """Certify ``lam`` outside the spectrum of a one-sided Toeplitz operator.

    For ``phi`` supported on Z+, ``T_phi - lam`` is ``p(S)`` with
    ``p = phi~ - lam``; if ``p`` has no zero on the closed disk of radius
    ``rho(S)`` (no zero on the circle and winding number zero), the power
    series of ``1/p`` gives the inverse ``sum c_k S^k``. The Z- side is the
    same statement for the backward shift.
    """
    if side not in ("S", "S-1"):
        raise ValueError("side must be 'S' or 'S-1'")
    sign = 1 if side == "S" else -1
    disk = predicted_sigma_unilateral(space, "forward" if sign > 0 else "backward")
    rho = disk.r
    lam = complex(lam)
    params = {"lambda": [lam.real, lam.imag], "side": side, "m": m, "radius": rho,
              "phi": phi.to_dict(), "tail_tol": tail_tol}
    sym = LaurentSymbol(phi if sign > 0 else LaurentSymbol(phi).reflected().coeffs)
    if sym.has_negative_powers:
        raise PreconditionError("symbol must be one-sided for the requested side")
    if rho == 0:
        return _inconclusive("zero spectral radius", params)
    theta = 2 * math.pi * np.arange(_CHECK_GRID) / _CHECK_GRID
    vals = eval_symbol(sym, rho * np.exp(1j * theta)) - lam
    delta = float(np.min(np.abs(vals))) - sym.lipschitz_constant(rho) * math.pi / _CHECK_GRID
    smax = float(np.max(np.abs(vals + lam)))
    if delta < DELTA_FRACTION * max(smax, abs(lam)):
        return _inconclusive("symbol comes within delta of lambda", params, delta=delta)
    wind = _winding_number(vals)
    if wind != 0:
        return _inconclusive("lambda is encircled by the symbol curve", params,
                             delta=delta, winding=wind)

    def g(z):
        return 1.0 / (eval_symbol(sym, z) - lam)

    psi = sym.coeffs - FiniteSeq.atom(0, lam)
    size = m
    while True:
        tr = _circle_transform(g, rho, rho, size)
        keep = tr.k >= 0
        tr = _Transform(tr.k[keep], tr.F[keep], tr.logr[keep])
        # only nonnegative powers exist; the validation window starts at 0
        c = tr.scaled(rho)
        prod = convolve(c, scale_seq(psi, rho)).dense(0, int(tr.k[-1]) + psi.lo)
        target = np.zeros_like(prod)
        target[0] = 1.0
        ident = float(np.max(np.abs(prod - target)))
        if not ident <= IDENTITY_TOL:
            return _inconclusive("convolution identity fails on the window", params,
                                 delta=delta, identity_residual=ident)
        t = tr.weighted_terms(space, sign)
        B = float(np.sum(t))
        q, tail = _side_tail(t)
        if (math.isfinite(B) and tail < tail_tol) or size >= max_m:
            break
        size *= 2
    params["m"] = size
    ev = {"delta": delta, "identity_residual": ident, "B": B + tail, "B_partial": B,
          "tail": tail, "decay_ratio": q, "winding": wind}
    if not math.isfinite(B) or not tail < tail_tol:
        return Certificate(INCONCLUSIVE, ev, params, "weighted coefficient sum not certified finite")
    return Certificate(OUTSIDE_BOUND, ev, params)


def _power_norm_bounds(op: OperatorSpec, horizon: int) -> list:
    """Submultiplicative bounds ``beta_n >= ||op^n||`` for ``n = 0..horizon``."""
    space = op.space
    if op.kind == "shift":
        return [shift_norm(space, op.k * n) for n in range(horizon + 1)]
    phi = op.phi
    one_sided = phi.lo >= 0 or phi.hi <= 0
    if op.kind == "multiplier" or one_sided:
        # op^n is the convolution operator of phi^{*n}; |phi|^{*n} dominates it
        absphi = FiniteSeq(phi.offset, np.abs(phi.coeffs))
        out, power = [1.0], FiniteSeq.atom(0)
        for _ in range(horizon):
            power = convolve(power, absphi)
            out.append(symbol_norm_upper(power, space))
        return out
    b = symbol_norm_upper(phi, space)
    return [b ** n for n in range(horizon + 1)]


def neumann_outside_certificate(op: OperatorSpec, lam: complex, horizon: int = 64,
                                tail_tol: float = TAIL_TOL) -> Certificate:
    """Certify ``lam`` outside the spectrum via ``-(sum_n op^n / lam^(n+1))``.

    ``B = sum_{n<H} beta_n / |lam|^(n+1)`` with ``beta_n >= ||op^n||``; the
    remainder is bounded through ``Q = beta_H / |lam|^H`` as
    ``Q / (1 - Q) * B``, valid because the bounds are submultiplicative.
    """
    lam = complex(lam)
    params = {"lambda": [lam.real, lam.imag], "horizon": horizon, "tail_tol": tail_tol,
              "operator": op.to_dict()}
    if lam == 0:
        return _inconclusive("Neumann series needs lambda != 0", params)
    beta = _power_norm_bounds(op, horizon)
    if any(math.isinf(b) for b in beta):
        return _inconclusive("operator powers are unbounded", params)
    a = abs(lam)
    terms = [beta[n] / a ** (n + 1) for n in range(horizon)]
    partial = float(sum(terms))
    Q = beta[horizon] / a ** horizon
    ev = {"B_partial": partial, "tail_ratio": Q}
    if Q >= 1.0:
        return Certificate(INCONCLUSIVE, ev, params, f"tail ratio {Q:.3g} >= 1")
    tail = Q / (1.0 - Q) * partial
    ev.update(B=partial + tail, tail=tail)
    if not tail < tail_tol:
        return Certificate(INCONCLUSIVE, ev, params, f"tail {tail:.3g} above tolerance")
    return Certificate(OUTSIDE_BOUND, ev, params)


# ---------------------------------------------------------------------------
# symbol bounds and scaling identities

def _interval_radii(space: SpaceSpec, count: int = 9) -> list:
    if space.domain is Domain.BILATERAL:
        reg = predicted_sigma_shift(space)
        lo, hi = reg.rmin, reg.rmax
    else:
        lo = 1.0 / spectral_radius_shift(space, "backward").upper
        hi = spectral_radius_shift(space, "forward").upper
    if math.isinf(hi) or lo == 0:
        raise PreconditionError("symbol bound checks need a bounded radius interval")
    if lo == hi:
        return [hi] * count
    return list(np.geomspace(lo, hi, count))


def check_symbol_bound(phi: FiniteSeq, space: SpaceSpec, radii=None, N: int = 256,
                       m: int = 4096, conj_tol: float = 0.05) -> dict:
    """Compare circle suprema of the symbol with bounds on the operator norm.

    Every ``sup_{C_r} |phi~|`` must stay below the shift-norm upper bound (plus
    1e-9). For constant and geometric weights on l2, the section norm at ``N``
    must also match the largest circle supremum to ``conj_tol``.
    """
    if radii is None:
        radii = _interval_radii(space)
    if space.domain is Domain.BILATERAL:
        op = OperatorSpec.multiplier(phi, space)
    else:
        op = OperatorSpec.toeplitz(phi, space)
    bracket = operator_norm_bracket(op, N)
    sups = [sup_on_circle(phi, float(r), m) for r in radii]
    rows = [{"r": float(r), "sup": s.value, "slack": s.slack,
             "within_upper": s.value <= bracket.upper + 1e-9}
            for r, s in zip(radii, sups)]
    smax = max(s.value for s in sups)
    report = {"rows": rows, "upper": bracket.upper, "lower": bracket.lower,
              "max_sup": smax, "passed": all(r["within_upper"] for r in rows)}
    if bracket.lower is not None:
        report["gap_to_lower"] = smax - bracket.lower
    w = space.norm.weight
    if space.is_hilbert and w.kind in ("constant", "geometric") and bracket.lower is not None:
        conj_ok = abs(bracket.lower - smax) <= conj_tol
        report["conjugation_check"] = conj_ok
        report["passed"] = report["passed"] and conj_ok
    return report


def check_scaling_identity(kind: str, phi: FiniteSeq, f: FiniteSeq, r: float,
                           relative: bool = False) -> float:
    """Deviation between the two sides of the radial scaling identity.

    Bilateral: ``(phi * f)_r`` against ``(phi)_r * (f)_r``. Unilateral:
    ``(P+(phi * f))_r`` against ``P+((phi)_r * (f)_r)``. With ``relative``
    each entry is divided by ``sum_j |phi(j)| |f(n-j)| r^n``.
    """
    if kind == "bilateral":
        lhs = scale_seq(convolve(phi, f), r)
        rhs = convolve(scale_seq(phi, r), scale_seq(f, r))
    elif kind == "unilateral":
        lhs = scale_seq(project_plus(convolve(phi, f)), r)
        rhs = project_plus(convolve(scale_seq(phi, r), scale_seq(f, r)))
    else:
        raise ValueError("kind must be 'bilateral' or 'unilateral'")
    diff = lhs - rhs
    if diff.is_zero:
        return 0.0
    dev = np.abs(diff.coeffs)
    if not relative:
        return float(dev.max())
    mag = convolve(FiniteSeq(phi.offset, np.abs(phi.coeffs)), FiniteSeq(f.offset, np.abs(f.coeffs)))
    mag = np.abs(scale_seq(mag, abs(r)).dense(diff.lo, diff.hi))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(mag > 0, dev / mag, np.where(dev > 0, np.inf, 0.0))
    return float(rel.max())


# ---------------------------------------------------------------------------
# dispatcher

def _classify(sym: LaurentSymbol, base, lam: complex, tol: float,
              radial: int = 129, angular: int = 2048):
    """Nearest sampled preimage of ``lam`` under ``sym`` on ``base``.

    Returns ``(z, where)`` with ``where`` one of outside, boundary (hit from an
    extreme circle of the base) or inside (hit from the interior).
    """
    rmin, rmax = base.rmin, base.rmax
    if math.isinf(rmax):
        rmax = base.truncation
    if rmin == 0 and sym.has_negative_powers:
        rmin = rmax / (radial - 1)
    radii = np.array([rmax]) if rmin == rmax else np.linspace(rmin, rmax, radial)
    theta = 2 * math.pi * np.arange(angular) / angular
    z = radii[:, None] * np.exp(1j * theta)[None, :]
    d = np.abs(eval_symbol(sym, z.ravel()).reshape(z.shape) - lam)
    i, j = np.unravel_index(int(np.argmin(d)), d.shape)
    if d[i, j] > tol:
        return None, OUTSIDE
    on_edge = i == radii.size - 1 or (i == 0 and base.rmin > 0)
    return complex(z[i, j]), BOUNDARY if on_edge else INSIDE


def verify_point(op: OperatorSpec, lam: complex, Ns: Sequence[int] = (20, 30, 40, 50, 60),
                 tol: float = 1e-2, m: int = 256, horizon: int = 64) -> Certificate:
    """Pick and run the witness appropriate for ``lam``.

    ``lam`` is located against the sampled symbol image of the predicted
    shift spectrum. Away from the image an inverse is constructed; when the
    nearest preimage lies on an extreme circle an approximate eigenvector is
    tried; interior preimages get a section blow-up study.
    """
    lam = complex(lam)
    space = op.space
    if math.isinf(symbol_norm_upper(op.phi, space)):
        raise HypothesisViolation("the operator is unbounded on this space")
    if op.unilateral:
        phi = op.phi
        if phi.lo >= 0:
            side, sym = "S", LaurentSymbol(phi)
            base = predicted_sigma_unilateral(space, "forward")
        elif phi.hi <= 0:
            side, sym = "S-1", LaurentSymbol(phi).reflected()
            base = predicted_sigma_unilateral(space, "backward")
        else:
            return _inconclusive("two-sided Toeplitz symbols have no predicted region",
                                 {"lambda": [lam.real, lam.imag]})
        zeta, where = _classify(sym, base, lam, tol)
        if where == OUTSIDE:
            if op.kind == "shift" and abs(lam) > base.r:
                return neumann_outside_certificate(op, lam, horizon)
            return toeplitz_outside_certificate(phi, lam, space, side, m)
        if where == BOUNDARY:
            # the reflected symbol is evaluated at 1/z in the operator's variable
            return inside_witness(op, zeta if side == "S" else 1.0 / zeta, Ns)
        return blowup_certificate(op, lam, Ns)
    base = predicted_sigma_shift(space)
    zeta, where = _classify(LaurentSymbol(op.phi), base, lam, tol)
    if where == OUTSIDE:
        return outside_certificate(op.phi, lam, space, m=m)
    if where == BOUNDARY:
        return inside_witness(op, zeta, Ns)
    return blowup_certificate(op, lam, Ns)
