import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_seq
from shiftspec import (Domain, DomainError, FiniteSeq, SpaceSpec, WeightFamily, scale_seq,
                       space_norm)
from shiftspec.spaces import ExponentRule, Orlicz, OrliczFunction, VariableExponent


def orlicz(K, w=None):
    return SpaceSpec(Domain.BILATERAL, Orlicz(K, w or WeightFamily.constant()))


def varexp(q):
    return SpaceSpec(Domain.BILATERAL, VariableExponent(q))


def test_finite_seq_trims_and_compares():
    f = FiniteSeq(-2, [0, 0, 1, 2, 0])
    assert f.lo == 0 and f.hi == 1 and list(f.coeffs) == [1, 2]
    assert FiniteSeq(3, [0, 0]).is_zero
    assert FiniteSeq.zero() == FiniteSeq(5, [])
    assert f[1] == 2 and f[7] == 0
    assert FiniteSeq.atom(2) + FiniteSeq.atom(-1) == FiniteSeq.from_mapping({2: 1, -1: 1})
    assert FiniteSeq.from_dict(f.to_dict()) == f


def test_finite_seq_is_immutable():
    f = FiniteSeq.atom(0)
    with pytest.raises(AttributeError):
        f.offset = 3


def test_space_norm_examples():
    assert space_norm(SpaceSpec.lp(), FiniteSeq(0, [1, 1])) == pytest.approx(math.sqrt(2), rel=1e-15)
    v = space_norm(orlicz(OrliczFunction.power(2)), FiniteSeq(0, [3, 4]))
    assert v == pytest.approx(5.0, rel=1e-10)
    assert space_norm(varexp(ExponentRule(3.0)), FiniteSeq.atom(0, 2.0)) == pytest.approx(2.0, rel=1e-12)


def test_zero_norm_and_domain_error():
    for s in (SpaceSpec.lp(), orlicz(OrliczFunction.power(3)), varexp(ExponentRule(2.0))):
        assert space_norm(s, FiniteSeq.zero()) == 0.0
    plus = SpaceSpec.lp(WeightFamily.constant(Domain.UNILATERAL))
    with pytest.raises(DomainError):
        space_norm(plus, FiniteSeq.atom(-1))


def test_space_rejects_mismatched_weight_domain():
    with pytest.raises(DomainError):
        SpaceSpec(Domain.UNILATERAL, Orlicz(OrliczFunction.power(2), WeightFamily.constant()))


def test_weighted_lp_frozen_value():
    # direct sum: |1|^3 2^{-3} + |2i|^3 + |-1|^3 2^3 with w = 2^n on support {-1, 0, 1}
    s = SpaceSpec.lp(WeightFamily.geometric(2), p=3)
    f = FiniteSeq(-1, [1, 2j, -1])
    assert space_norm(s, f) == pytest.approx((0.125 + 8 + 8) ** (1 / 3), rel=1e-14)


def test_orlicz_weight_enters_modular_linearly():
    # modular sum K(|x|/t) w(n): single atom gives K(|c|/t) w = 1
    w = WeightFamily.geometric(2)
    K = OrliczFunction.power(2)
    v = space_norm(orlicz(K, w), FiniteSeq.atom(3, 1.5))
    assert v == pytest.approx(1.5 * math.sqrt(8), rel=1e-12)


def test_orlicz_table_function():
    # K(x) = x on [0,1] then slope 3: convex and increasing
    K = OrliczFunction.table([0, 1, 2], [0, 1, 4])
    assert float(K(0.5)) == pytest.approx(0.5) and float(K(3.0)) == pytest.approx(7.0)
    # single atom: K(c/t) = 1 means c/t = 1
    assert space_norm(orlicz(K), FiniteSeq.atom(0, 2.5)) == pytest.approx(2.5, rel=1e-12)
    # two unit atoms: 2 K(1/t) = 1 gives 1/t = 1/2
    assert space_norm(orlicz(K), FiniteSeq(0, [1, 1])) == pytest.approx(2.0, rel=1e-12)


def test_orlicz_table_rejects_nonconvex():
    with pytest.raises(ValueError):
        OrliczFunction.table([0, 1, 2], [0, 2, 3])
    with pytest.raises(ValueError):
        OrliczFunction.table([0, 1], [0.5, 1])
    with pytest.raises(ValueError):
        OrliczFunction.power(0.5)


def test_variable_exponent_frozen_value():
    # q = 1 at n = 0, q = 2 elsewhere; f = e_0 + e_1: solve 1/t + 1/t^2 = 1
    q = ExponentRule(2.0, table=(1.0,), offset=0)
    t = (1 + math.sqrt(5)) / 2
    assert space_norm(varexp(q), FiniteSeq(0, [1, 1])) == pytest.approx(t, rel=1e-12)
    with pytest.raises(ValueError):
        ExponentRule(0.5)


def test_scale_seq_examples(rng):
    f = random_seq(rng, -5, 5)
    assert scale_seq(f, 1) == f
    assert scale_seq(FiniteSeq.atom(3), 2) == FiniteSeq.atom(3, 8.0)
    assert scale_seq(FiniteSeq.atom(-2), 2) == FiniteSeq.atom(-2, 0.25)
    with pytest.raises(ValueError):
        scale_seq(f, 0)
    for _ in range(20):
        f = random_seq(rng, -6, 6)
        r, s = complex(*rng.uniform(0.3, 2, 2)), complex(*rng.uniform(0.3, 2, 2))
        assert scale_seq(scale_seq(f, r), s).allclose(scale_seq(f, r * s), atol=1e-12 * np.abs(f.coeffs).max() * 50)


# --- invariants -------------------------------------------------------------

SPACES = [
    SpaceSpec.lp(WeightFamily.constant(), 1),
    SpaceSpec.lp(WeightFamily.two_sided_exp(0.5), 2),
    SpaceSpec.lp(WeightFamily.geometric(1.5), 3.5),
    orlicz(OrliczFunction.power(3), WeightFamily.polynomial(1)),
    orlicz(OrliczFunction.table([0, 1, 2, 4], [0, 0.5, 2, 8])),
    varexp(ExponentRule(2.0, table=(1.0, 3.0, 1.5), offset=-1)),
]

coeff_arrays = arrays(np.float64, st.integers(1, 8), elements=st.floats(-10, 10)).filter(
    lambda a: np.abs(a).max() > 1e-3)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SPACES), st.integers(-4, 4), coeff_arrays, st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_homogeneity(space, off, a, c):
    f = FiniteSeq(off, a)
    assert space_norm(space, f * c) == pytest.approx(abs(c) * space_norm(space, f), rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SPACES), st.integers(-4, 4), coeff_arrays, st.integers(-4, 4), coeff_arrays)
def test_triangle_inequality(space, o1, a, o2, b):
    f, g = FiniteSeq(o1, a), FiniteSeq(o2, b)
    assert space_norm(space, f + g) <= space_norm(space, f) + space_norm(space, g) + 1e-10


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
def test_orlicz_power_matches_lp(rng, p):
    # modular uses w(n) linearly, so Orlicz(x^p, w^p) is the weighted lp norm
    base = WeightFamily.two_sided_exp(0.3)
    wp = WeightFamily.two_sided_exp(0.3 * p)
    for _ in range(30):
        f = random_seq(rng, -6, 6)
        a = space_norm(SpaceSpec.lp(base, p), f)
        b = space_norm(orlicz(OrliczFunction.power(p), wp), f)
        assert b == pytest.approx(a, rel=1e-10)


@pytest.mark.parametrize("p", [1.0, 2.5, 3.0])
def test_constant_exponent_matches_lp(rng, p):
    for _ in range(30):
        f = random_seq(rng, -6, 6)
        a = space_norm(SpaceSpec.lp(p=p), f)
        assert space_norm(varexp(ExponentRule(p)), f) == pytest.approx(a, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES[:3]), st.integers(-4, 4), coeff_arrays, st.floats(0, 2 * math.pi))
def test_unimodular_scaling_is_isometric(space, off, a, theta):
    f = FiniteSeq(off, a)
    z = complex(math.cos(theta), math.sin(theta))
    assert space_norm(space, scale_seq(f, z)) == pytest.approx(space_norm(space, f), rel=1e-14)
