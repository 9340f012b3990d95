import math

import numpy as np
import pytest

from shiftspec import (Annulus, Circle, Disk, Domain, FiniteSeq, HypothesisViolation, LaurentSymbol,
                       PreconditionError, SpaceSpec, WeightFamily, hausdorff,
                       predicted_sigma_multiplier, predicted_sigma_shift,
                       predicted_sigma_toeplitz, predicted_sigma_unilateral, region_contains)
from shiftspec.spectra import BOUNDARY, EQUALITY, INCLUSION_ONLY, INSIDE, OUTSIDE, Image

E = math.e
COS = FiniteSeq.atom(1) + FiniteSeq.atom(-1)
PLUS = Domain.UNILATERAL


def lp(w):
    return SpaceSpec.lp(w)


def test_shift_prediction_examples():
    c = predicted_sigma_shift(lp(WeightFamily.constant()))
    assert isinstance(c, Circle) and c.r == 1
    a = predicted_sigma_shift(lp(WeightFamily.two_sided_exp(1)))
    assert a.rmin == pytest.approx(1 / E, abs=1e-12) and a.rmax == pytest.approx(E, abs=1e-12)
    u = predicted_sigma_shift(lp(WeightFamily.piecewise_super_exp()))
    assert u.rmin == 1 and u.rmax == math.inf and not u.bounded
    assert u.truncation == 4.0
    assert u.to_dict()["rmax"] == "inf"


def test_shift_prediction_errors():
    both = WeightFamily.table([1.0], tail="geometric", tail_ratio=2.0)
    assert predicted_sigma_shift(lp(both)).rmin == pytest.approx(2.0)
    with pytest.raises(PreconditionError):
        predicted_sigma_shift(lp(WeightFamily.constant(PLUS)))


def test_both_shifts_unbounded_is_a_hypothesis_violation(monkeypatch):
    # no built-in bilateral family has both shifts unbounded, so force it
    import shiftspec.spectra as sp
    unbounded = type("Report", (), {"bounded": False})()
    monkeypatch.setattr(sp, "boundedness", lambda space, direction: unbounded)
    with pytest.raises(HypothesisViolation):
        predicted_sigma_shift(lp(WeightFamily.constant()))


def test_unilateral_prediction_examples():
    d = predicted_sigma_unilateral(lp(WeightFamily.constant(PLUS)), "forward")
    assert isinstance(d, Disk) and d.r == 1
    d = predicted_sigma_unilateral(lp(WeightFamily.geometric(0.5, PLUS)), "forward")
    assert d.r == pytest.approx(0.5)
    d = predicted_sigma_unilateral(lp(WeightFamily.constant(PLUS)), "backward")
    assert d.r == 1
    with pytest.raises(HypothesisViolation):
        predicted_sigma_unilateral(lp(WeightFamily.piecewise_super_exp(PLUS)))
    with pytest.raises(PreconditionError):
        predicted_sigma_unilateral(lp(WeightFamily.constant()))


def test_multiplier_prediction_examples():
    ann = lp(WeightFamily.two_sided_exp(1))
    img = predicted_sigma_multiplier(FiniteSeq.atom(1), ann, radial=33, angular=256)
    assert img.relation == EQUALITY
    r = np.abs(img.points)
    assert r.min() == pytest.approx(1 / E) and r.max() == pytest.approx(E)

    seg = predicted_sigma_multiplier(COS, lp(WeightFamily.constant()), angular=1024)
    assert np.abs(seg.points.imag).max() < 1e-14
    assert seg.points.real.min() == pytest.approx(-2) and seg.points.real.max() == pytest.approx(2)

    ell = predicted_sigma_multiplier(COS, ann, radial=65, angular=1024)
    x, y = ell.points.real, ell.points.imag
    assert x.max() == pytest.approx(E + 1 / E, rel=1e-9)
    assert y.max() == pytest.approx(E - 1 / E, rel=1e-3)
    # every sample lies inside the boundary ellipse
    assert np.all((x / (E + 1 / E)) ** 2 + (y / (E - 1 / E)) ** 2 <= 1 + 1e-9)


def test_toeplitz_prediction_examples():
    plus = lp(WeightFamily.constant(PLUS))
    img = predicted_sigma_toeplitz(FiniteSeq.atom(1), plus, "S", radial=17, angular=128)
    assert img.relation == INCLUSION_ONLY
    assert np.abs(img.points).max() == pytest.approx(1)
    back = predicted_sigma_toeplitz(FiniteSeq.atom(-1), plus, "S-1", radial=17, angular=128)
    assert np.abs(back.points).max() == pytest.approx(1)
    assert back.metadata["variable"] == "1/z"
    shifted = predicted_sigma_toeplitz(FiniteSeq(0, [1, 1]), plus, "S", radial=17, angular=128)
    assert np.abs(shifted.points - 1).max() == pytest.approx(1)
    with pytest.raises(PreconditionError):
        predicted_sigma_toeplitz(COS, plus, "S")
    with pytest.raises(PreconditionError):
        predicted_sigma_toeplitz(FiniteSeq.atom(1), plus, "S-1")


def test_region_contains_examples():
    assert region_contains(Annulus(1 / E, E), 1) == INSIDE
    assert region_contains(Disk(1.0), 1 + 0j, tol=1e-9) == BOUNDARY
    assert region_contains(Disk(1.0), 0.5) == INSIDE
    assert region_contains(Annulus(1 / E, E), 0.1) == OUTSIDE
    assert region_contains(Circle(2.0), 2j) == BOUNDARY
    seg = Image(LaurentSymbol(COS), Circle(1.0), angular=1024)
    assert region_contains(seg, 1 + 1j, tol=1e-3) == OUTSIDE
    assert region_contains(seg, 0.5, tol=1e-2) == INSIDE
    with pytest.raises(ValueError):
        region_contains(Disk(1.0), 0, tol=-1)


def test_hausdorff_examples():
    t = np.exp(2j * np.pi * np.arange(500) / 500)
    assert hausdorff(t, t) == 0
    assert hausdorff(t, 2 * t) == pytest.approx(1)
    far = np.concatenate([t, [5 + 0j]])
    assert hausdorff(t, far) == pytest.approx(4)
    with pytest.raises(ValueError):
        hausdorff(t, [])


def test_hausdorff_matches_brute_force(rng):
    a = rng.normal(size=60) + 1j * rng.normal(size=60)
    b = rng.normal(size=40) + 1j * rng.normal(size=40)
    d = np.abs(a[:, None] - b[None, :])
    assert hausdorff(a, b) == pytest.approx(max(d.min(1).max(), d.min(0).max()), rel=1e-14)


# --- invariants -------------------------------------------------------------

def test_constant_weight_multiplier_is_essential_range(rng):
    phi = FiniteSeq(-2, rng.normal(size=5) + 1j * rng.normal(size=5))
    img = predicted_sigma_multiplier(phi, lp(WeightFamily.constant()), angular=2048)
    theta = rng.uniform(0, 2 * np.pi, 3000)
    independent = sum(c * np.exp(1j * n * theta) for n, c in phi.items())
    # every independent sample is within a grid pitch of the cloud
    assert hausdorff(img.points, np.concatenate([independent, img.points])) <= img.pitch


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0, E])
def test_geometric_weight_gives_single_circle(a):
    c = predicted_sigma_shift(lp(WeightFamily.geometric(a)))
    assert isinstance(c, Circle)
    assert c.rmin == pytest.approx(a, abs=1e-9) and c.rmax == pytest.approx(a, abs=1e-9)


def reflected(w, invert=False):
    """The weight n -> w(-n), or n -> 1 / w(-n) with ``invert``."""
    if w.kind == "table":
        ent = list(reversed(w.entries))
        ratio = 1 / w.tail_ratio
        if invert:
            ent, ratio = [1 / e for e in ent], w.tail_ratio
        return WeightFamily.table(ent, offset=-w.hi, tail=w.tail, tail_ratio=ratio)
    if w.kind == "two_sided_exp":
        return WeightFamily.two_sided_exp(-w.alpha if invert else w.alpha)
    if w.kind == "geometric":
        return w if invert else WeightFamily.geometric(1 / w.a)
    if w.kind == "polynomial":
        return WeightFamily.polynomial(-w.s if invert else w.s)
    raise AssertionError(w.kind)


WEIGHTS = [
    WeightFamily.two_sided_exp(1.0),
    WeightFamily.two_sided_exp(-0.7),
    WeightFamily.geometric(1.7),
    WeightFamily.polynomial(2.0),
    WeightFamily.table([1, 4, 2, 8], offset=-1, tail="geometric", tail_ratio=1.3),
    WeightFamily.table([3, 1, 2], offset=2, tail="geometric", tail_ratio=0.6),
]


@pytest.mark.parametrize("w", WEIGHTS)
def test_reflection_maps_annulus_through_inversion(w):
    # n -> -n swaps rho(S) and rho(S^-1): the annulus goes to its image under z -> 1/z
    a = predicted_sigma_shift(lp(w))
    b = predicted_sigma_shift(lp(reflected(w)))
    assert b.rmin == pytest.approx(1 / a.rmax, abs=1e-9)
    assert b.rmax == pytest.approx(1 / a.rmin, abs=1e-9)


@pytest.mark.parametrize("w", WEIGHTS)
def test_annulus_invariant_under_weight_inversion(w):
    # w -> 1/w composes a second z -> 1/z with the reflection, so n -> 1/w(-n)
    # leaves the annulus fixed
    a = predicted_sigma_shift(lp(w))
    b = predicted_sigma_shift(lp(reflected(w, invert=True)))
    assert b.rmin == pytest.approx(a.rmin, abs=1e-9)
    assert b.rmax == pytest.approx(a.rmax, abs=1e-9)
