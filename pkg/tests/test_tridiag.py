import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastica.tridiag import CyclicTridiagonal, NearSingularError, solve_cyclic, solve_dense


def dominant_system(rng, n, batch=()):
    off = rng.uniform(-1, 1, size=batch + (n,))
    diag = np.abs(off) + np.abs(np.roll(off, -1, axis=-1)) + rng.uniform(0.1, 2, size=batch + (n,))
    diag *= rng.choice([-1, 1], size=batch + (1,))
    return CyclicTridiagonal(diag, off)


def rel_err(x, y):
    return np.max(np.abs(x - y)) / np.max(np.abs(y))


def test_identity_returns_rhs(rng):
    b = rng.normal(size=7)
    sys_ = CyclicTridiagonal(np.ones(7), np.zeros(7))
    assert np.array_equal(solve_cyclic(sys_, b), b)
    assert np.allclose(solve_dense(sys_, b), b, atol=0)


def test_circulant_constant_rhs():
    d, t, c = 3.0, -0.7, 2.5
    x = solve_cyclic(CyclicTridiagonal(np.full(9, d), np.full(9, t)), np.full(9, c))
    assert np.allclose(x, c / (d + 2 * t), rtol=1e-14)


@pytest.mark.parametrize('n', [3, 4, 8, 100, 1000])
def test_matches_dense(rng, n):
    for _ in range(10):
        s = dominant_system(rng, n)
        b = rng.normal(size=n)
        x = solve_cyclic(s, b)
        assert rel_err(x, solve_dense(s, b)) <= 1e-10
        resid = np.max(np.abs(s.matvec(x) - b))
        scale = np.max(s.row_scale()) * np.max(np.abs(x)) + np.max(np.abs(b))
        assert resid <= 1e-10 * scale


def test_matvec_matches_dense(rng):
    s = dominant_system(rng, 6)
    x = rng.normal(size=6)
    assert np.allclose(s.matvec(x), s.dense() @ x, atol=1e-14)
    assert np.allclose(s.dense(), s.dense().T)


def test_two_periodic_coefficients(rng):
    n = 12
    diag = np.tile([4.0, 3.0], n // 2)
    off = np.tile([-1.0, 0.5], n // 2)
    s = CyclicTridiagonal(diag, off)
    b = rng.normal(size=n)
    assert rel_err(solve_cyclic(s, b), solve_dense(s, b)) <= 1e-10


def test_batched_matches_loop(rng):
    s = dominant_system(rng, 20, batch=(3, 4))
    b = rng.normal(size=(3, 4, 20))
    x = solve_cyclic(s, b)
    for i in range(3):
        for j in range(4):
            xi = solve_cyclic(CyclicTridiagonal(s.diag[i, j], s.off[i, j]), b[i, j])
            assert np.allclose(x[i, j], xi, rtol=1e-13, atol=1e-15)


def test_dense_rejects_singular():
    # rows of the circulant (2, -1, -1) sum to zero: constant null vector
    s = CyclicTridiagonal(np.full(5, 2.0), np.full(5, -1.0))
    with pytest.raises(NearSingularError):
        solve_dense(s, np.ones(5))


def test_cyclic_flags_singular_system():
    s = CyclicTridiagonal(np.full(6, 2.0), np.full(6, -1.0))
    with pytest.raises(NearSingularError) as info:
        solve_cyclic(s, np.arange(6.0))
    assert info.value.smallest_pivot >= 0


def test_zero_pivot_in_core():
    # d_0 = 0 after the corner split is avoided by gamma = -d_0; a zero interior pivot is caught
    s = CyclicTridiagonal(np.array([1.0, 1.0, 1.0, 1.0]), np.array([0.0, 1.0, 0.0, 0.0]))
    with pytest.raises(NearSingularError):
        solve_cyclic(s, np.ones(4))


def test_shape_validation():
    with pytest.raises(ValueError):
        CyclicTridiagonal(np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        CyclicTridiagonal(np.ones(2), np.ones(2))
    with pytest.raises(ValueError):
        solve_cyclic(CyclicTridiagonal(np.ones(3), np.zeros(3)), np.ones(4))


@given(st.integers(3, 60), st.integers(0, 2 ** 32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity(n, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    s = dominant_system(rng, n)
    r1, r2 = rng.normal(size=(2, n))
    lhs = solve_cyclic(s, alpha * r1 + beta * r2)
    rhs = alpha * solve_cyclic(s, r1) + beta * solve_cyclic(s, r2)
    scale = max(1.0, np.max(np.abs(lhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale


@given(st.integers(3, 60), st.integers(0, 2 ** 32 - 1))
def test_inverse_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    s = dominant_system(rng, n)
    x, y = rng.normal(size=(2, n))
    a = x @ solve_cyclic(s, y)
    b = solve_cyclic(s, x) @ y
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@given(st.integers(3, 40), st.integers(0, 2 ** 32 - 1))
def test_dominant_systems_never_fall_back(n, seed):
    s = dominant_system(np.random.default_rng(seed), n)
    assert s.is_dominant()
    solve_cyclic(s, np.ones(n))
