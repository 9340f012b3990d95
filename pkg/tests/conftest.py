import numpy as np
import pytest

from shiftspec import Domain, FiniteSeq, SpaceSpec, WeightFamily


def brute_shift_norm(weight_fn, k, window=1000, unilateral=False):
    """sup of w(n+k)/w(n) over a window, straight from the weight formula."""
    lo = max(0, -k) if unilateral else -window
    n = np.arange(lo, window + 1)
    return max(weight_fn(int(j + k)) / weight_fn(int(j)) for j in n)


def random_seq(rng, lo, hi, complex_=True):
    n = rng.integers(1, hi - lo + 2)
    off = int(rng.integers(lo, hi - n + 2))
    c = rng.normal(size=n)
    if complex_:
        c = c + 1j * rng.normal(size=n)
    return FiniteSeq(off, c)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def l2():
    return SpaceSpec.lp(WeightFamily.constant())


@pytest.fixture
def l2_plus():
    return SpaceSpec.lp(WeightFamily.constant(Domain.UNILATERAL))
