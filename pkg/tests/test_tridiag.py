import numpy as np
import pytest

from shiftspec import sturm_count, tridiagonal_eigenvalues
from shiftspec.tridiag import tridiagonal_parts


def test_sturm_count_small():
    # eigenvalues of [[2, 1], [1, 2]] are 1 and 3
    d, e = np.array([2.0, 2.0]), np.array([1.0])
    assert [sturm_count(d, e, x) for x in (0.5, 2.0, 3.5)] == [0, 1, 2]


def test_eigenvalues_match_lapack(rng):
    for n in (1, 2, 7, 40):
        d, e = rng.normal(size=n), rng.normal(size=n - 1)
        T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        assert np.allclose(tridiagonal_eigenvalues(d, e), np.linalg.eigvalsh(T), atol=1e-11)


def test_eigenvalues_closed_form():
    n = 30
    got = tridiagonal_eigenvalues(np.zeros(n), np.ones(n - 1))
    k = np.arange(n, 0, -1)
    assert np.allclose(got, 2 * np.cos(k * np.pi / (n + 1)), atol=1e-12)


def test_repeated_eigenvalues():
    # decoupled blocks give a double eigenvalue
    got = tridiagonal_eigenvalues([1.0, 1.0, 1.0], [0.0, 0.0])
    assert np.allclose(got, [1, 1, 1], atol=1e-12)


def test_parts_and_errors():
    A = np.diag([1.0, 2, 3]) + np.diag([4.0, 5], 1) + np.diag([4.0, 5], -1)
    d, e = tridiagonal_parts(A)
    assert list(d) == [1, 2, 3] and list(e) == [4, 5]
    with pytest.raises(ValueError):
        tridiagonal_parts(np.ones((3, 3)))
    with pytest.raises(ValueError):
        tridiagonal_parts(np.eye(2) * 1j)
    with pytest.raises(ValueError):
        tridiagonal_eigenvalues([1.0, 2.0], [1.0, 2.0])
