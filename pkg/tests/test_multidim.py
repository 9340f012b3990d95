import math
import pickle

import numpy as np
import pytest

from shiftspec import (Annulus, Circle, FiniteSeq, MultiIndexSeq, PoleError, PreconditionError,
                       SpaceSpec, UnsupportedNormError, WeightFamily, approx_eigen_residual_multi,
                       eval_symbol_multi, hausdorff, joint_exclusion_test,
                       joint_region_separable, multi_convolve, outside_certificate_multi,
                       predicted_sigma_multiplier, predicted_sigma_multiplier_multi,
                       region_contains)
from shiftspec.multidim import exclusion_test_family
from shiftspec.spectra import OUTSIDE
from shiftspec.verify import INCONCLUSIVE, OUTSIDE_BOUND

E = math.e
CONST = SpaceSpec.lp(WeightFamily.constant())
GEO2 = SpaceSpec.lp(WeightFamily.geometric(2))
EXP1 = SpaceSpec.lp(WeightFamily.two_sided_exp(1))
SUM = MultiIndexSeq.atom((1, 0)) + MultiIndexSeq.atom((0, 1))


def random_multi(rng, k=2, lo=-2, hi=2):
    shape = tuple(rng.integers(1, hi - lo + 2, k))
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return MultiIndexSeq(tuple(rng.integers(lo, hi - s + 2) for s in shape), a)


def test_multi_index_seq_basics():
    f = MultiIndexSeq((-1, 0), [[0, 0], [0, 2], [0, 0]])
    assert f.offset == (0, 1) and f.entries == {(0, 1): 2}
    assert MultiIndexSeq.from_mapping({(1, -1): 3, (0, 0): 1}).entries == {(1, -1): 3, (0, 0): 1}
    assert (SUM - SUM).is_zero
    assert MultiIndexSeq.from_dict(SUM.to_dict()) == SUM
    assert pickle.loads(pickle.dumps(SUM)) == SUM
    with pytest.raises(ValueError):
        MultiIndexSeq((0,), [1.0])
    with pytest.raises(AttributeError):
        SUM.offset = (1, 1)


def test_eval_symbol_multi_examples():
    assert eval_symbol_multi(SUM, (1, 1)) == 2
    assert eval_symbol_multi(MultiIndexSeq.atom((1, -1)), (2, 4)) == pytest.approx(0.5)
    assert eval_symbol_multi(MultiIndexSeq.atom((0, 0)), (0.3 + 2j, -7)) == 1
    with pytest.raises(PoleError):
        eval_symbol_multi(MultiIndexSeq.atom((0, -1)), (1, 0))


def test_eval_symbol_multi_direct_sum(rng):
    for k in (2, 3):
        phi = random_multi(rng, k)
        z = tuple(complex(*rng.uniform(0.5, 1.5, 2)) for _ in range(k))
        direct = sum(v * np.prod([zi ** ni for zi, ni in zip(z, n)]) for n, v in phi.entries.items())
        assert eval_symbol_multi(phi, z) == pytest.approx(direct, rel=1e-12)


def test_multi_convolve_matches_loop(rng):
    a, b = random_multi(rng), random_multi(rng)
    out = {}
    for n, x in a.entries.items():
        for m, y in b.entries.items():
            key = tuple(i + j for i, j in zip(n, m))
            out[key] = out.get(key, 0) + x * y
    expect = MultiIndexSeq.from_mapping(out)
    got = multi_convolve(a, b)
    assert got.offset == expect.offset
    assert np.allclose(got.array, expect.array, atol=1e-12)


def test_symbol_of_convolution_is_product(rng):
    for _ in range(20):
        a, b = random_multi(rng), random_multi(rng)
        z = tuple(complex(*rng.uniform(0.5, 1.5, 2)) for _ in range(2))
        lhs = eval_symbol_multi(multi_convolve(a, b), z)
        assert lhs == pytest.approx(eval_symbol_multi(a, z) * eval_symbol_multi(b, z), rel=1e-12)


def test_joint_region_examples():
    r = joint_region_separable([CONST, CONST])
    assert all(isinstance(f, Circle) and f.r == 1 for f in r.factors) and r.exact
    r = joint_region_separable([GEO2, CONST])
    assert r.factors[0].r == pytest.approx(2) and r.factors[1].r == 1
    r = joint_region_separable([EXP1, GEO2])
    assert isinstance(r.factors[0], Annulus)
    assert r.radii(0) == pytest.approx((1 / E, E)) and r.radii(1) == pytest.approx((2, 2))
    assert r.contains((1.0, 2j)) and not r.contains((1.0, 1.0))


def test_joint_region_rejects_unsupported():
    with pytest.raises(UnsupportedNormError):
        joint_region_separable([SpaceSpec.lp(WeightFamily.polynomial(1)), CONST])
    with pytest.raises(UnsupportedNormError):
        joint_region_separable([SpaceSpec.lp(p=3), CONST])
    with pytest.raises(ValueError):
        joint_region_separable([CONST])
    with pytest.raises(PreconditionError):
        joint_region_separable([SpaceSpec.lp(WeightFamily.constant("unilateral")), CONST])


def test_exclusion_examples():
    spaces = [GEO2, CONST]
    ex = joint_exclusion_test((3, 1), spaces)
    assert ex.verdict == "excluded" and ex.witness == MultiIndexSeq.atom((1, 0))
    assert ex.bound == pytest.approx(2) and ex.value == pytest.approx(3)
    z = (2 * np.exp(1j * np.pi / 4), np.exp(1j))
    assert joint_exclusion_test(z, spaces).verdict == "unknown"
    ex = joint_exclusion_test((2, 0.5), spaces)
    assert ex.verdict == "excluded" and ex.witness == MultiIndexSeq.atom((0, -1))


def test_exclusion_family_is_seeded():
    a = list(exclusion_test_family(2, degree=1, random_count=3, seed=5))
    b = list(exclusion_test_family(2, degree=1, random_count=3, seed=5))
    assert a == b and len(a) == 9 + 3
    assert a[0] == MultiIndexSeq.atom((0, 0))


def test_exclusion_sound_on_exact_regions():
    for spaces in ([GEO2, CONST], [EXP1, CONST], [EXP1, GEO2]):
        region = joint_region_separable(spaces)
        for z in region.sample(100, seed=11):
            assert joint_exclusion_test(z, spaces, random_count=16).verdict == "unknown"


def test_multiplier_multi_examples():
    c = predicted_sigma_multiplier_multi(MultiIndexSeq.atom((1, 0)), [GEO2, CONST], angular=64)
    assert np.allclose(np.abs(c.points), 2)
    c = predicted_sigma_multiplier_multi(SUM, [GEO2, CONST], angular=256)
    r = np.abs(c.points)
    assert r.min() == pytest.approx(1, abs=1e-2) and r.max() == pytest.approx(3, abs=1e-12)
    assert c.metadata["relation"] == "equality"
    c = predicted_sigma_multiplier_multi(MultiIndexSeq.atom((1, 1)), [CONST, CONST], angular=64)
    assert np.allclose(np.abs(c.points), 1)


def test_degenerate_second_axis_reproduces_one_dimension():
    phi1 = FiniteSeq(-1, [1, 0.5, 2])
    phi2 = MultiIndexSeq((-1, 0), [[1], [0.5], [2]])
    for space in (CONST, EXP1):
        c2 = predicted_sigma_multiplier_multi(phi2, [space, CONST], angular=512, radial=9)
        c1 = predicted_sigma_multiplier(phi1, space, radial=9, angular=512)
        pitch = c2.metadata["pitch"]
        assert hausdorff(c1.points, c2.points) <= pitch


def test_residual_multi_examples():
    assert approx_eigen_residual_multi(SUM, (1j, 1), [CONST, CONST], 60) <= 0.3
    ident = MultiIndexSeq.atom((0, 0))
    assert approx_eigen_residual_multi(ident, (0.3j, 2), [CONST, GEO2], 20) == pytest.approx(0, abs=1e-15)
    assert approx_eigen_residual_multi(MultiIndexSeq.atom((1, 0)), (2, 1), [GEO2, CONST], 60) <= 0.3


def test_residual_multi_by_hand():
    # e_(1,0) on constant weights: relative residual is the 1-D boundary ratio
    N = 25
    r = approx_eigen_residual_multi(MultiIndexSeq.atom((1, 0)), (1j, 1), [CONST, CONST], N)
    assert r == pytest.approx(math.sqrt(2 / (2 * N + 1)), rel=1e-12)


def test_outside_certificate_multi_examples():
    spaces = [GEO2, CONST]
    for lam in (3.5, 0.5):
        c = outside_certificate_multi(SUM, lam, spaces)
        assert c.verdict == OUTSIDE_BOUND
        assert c.evidence["identity_residual"] <= 1e-8
        assert c.evidence["B"] == pytest.approx(2.0, rel=1e-6)
    c = outside_certificate_multi(SUM, 2, spaces)
    assert c.verdict == INCONCLUSIVE


def test_certified_points_lie_outside_cloud():
    spaces = [GEO2, CONST]
    cloud = predicted_sigma_multiplier_multi(SUM, spaces, angular=256)
    pitch = cloud.metadata["pitch"]
    for lam in (3.5, 0.5, 3.2j, -0.4 + 0.3j, 2.5, 1.5j):
        c = outside_certificate_multi(SUM, lam, spaces)
        if c.verdict == OUTSIDE_BOUND:
            assert region_contains(cloud, lam, pitch) == OUTSIDE
    assert outside_certificate_multi(SUM, 3.2j, spaces).verdict == OUTSIDE_BOUND
