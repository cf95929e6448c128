import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastica.checks import closed_increments, random_shape
from elastica.curves import Chain, generate_shape
from elastica.metric import (ElasticParams, elastic_inner, field_from_increments, horizontal_increments,
                             horizontal_m, project_horizontal, projection_system, quotient_inner,
                             quotient_inner_direct, turning, vertical_field)
from elastica.tridiag import solve_dense

P1 = ElasticParams(1.0, 1.0)


def rot(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s], [s, c]])


def test_params_validated():
    for a, b in [(0, 1), (1, -1), (np.inf, 1), (np.nan, 1)]:
        with pytest.raises(ValueError):
            ElasticParams(a, b)


def test_zero_and_translation(rng, ellipse100):
    z = rng.normal(size=(100, 2))
    assert elastic_inner(np.zeros((100, 2)), z, ellipse100, P1) == 0
    w = np.tile(rng.normal(size=2), (100, 1))
    assert elastic_inner(w, z, ellipse100, P1) == 0


def test_size_mismatch(ellipse100):
    with pytest.raises(ValueError):
        elastic_inner(np.zeros((99, 2)), np.zeros((100, 2)), ellipse100, P1)
    with pytest.raises(ValueError):
        horizontal_m(ellipse100, np.zeros(7), P1)


def test_square_chain_hand_sum(rng):
    sq = Chain(np.array([[0, 0], [0.25, 0], [0.25, 0.25], [0, 0.25]]))
    w, z = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
    params = ElasticParams(0.3, 2.0)
    tangents = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    total = 0.0
    for k in range(4):
        dw = w[(k + 1) % 4] - w[k]
        dz = z[(k + 1) % 4] - z[k]
        vx, vy = tangents[k]
        nx, ny = -vy, vx
        total += 0.3 * (dw[0] * vx + dw[1] * vy) * (dz[0] * vx + dz[1] * vy)
        total += 2.0 * (dw[0] * nx + dw[1] * ny) * (dz[0] * nx + dz[1] * ny)
    assert elastic_inner(w, z, sq, params) == pytest.approx(4 * total, rel=1e-13)


def test_phi_zero_gives_m_zero(ellipse100):
    assert np.all(horizontal_m(ellipse100, np.zeros(100), P1) == 0)


@pytest.mark.parametrize('a, b', [(1, 1), (100, 1), (0.01, 1)])
def test_regular_polygon_constant_phi(a, b):
    n = 40
    params = ElasticParams(a, b)
    c = 0.7
    th = 2 * np.pi * np.arange(n) / n
    D = 2 * np.pi / n
    expect = b / n * c * np.sin(D) / (a * (1 - np.cos(D)) ** 2 + b * np.sin(D) ** 2)
    m = horizontal_m(th, np.full(n, c), params)
    assert np.allclose(m, expect, rtol=1e-12, atol=0)


def test_m_matches_dense_at_n6(rng):
    th = np.sort(rng.uniform(0, 2 * np.pi, 6))
    th = np.concatenate([th[:1], th[1:]])
    phi = rng.normal(size=6)
    params = ElasticParams(0.5, 2.0)
    m = horizontal_m(th, phi, params)
    rhs = params.b / 6 * np.sin(turning(th)) * np.roll(phi, 1)
    ref = solve_dense(projection_system(th, params), rhs)
    assert np.max(np.abs(m - ref)) <= 1e-10 * np.max(np.abs(ref))
    A = projection_system(th, params).dense()
    assert np.max(np.abs(A @ m - rhs)) <= 1e-10 * np.max(np.abs(rhs))


def _random_setup(rng, n=100):
    chain = random_shape(rng, n, amplitude=0.15)
    th = chain.theta
    phi = closed_increments(th, rng.normal(size=n))
    return chain, th, phi


@pytest.mark.parametrize('a, b', [(1, 1), (100, 1), (0.01, 1)])
def test_orthogonal_to_vertical(rng, a, b):
    params = ElasticParams(a, b)
    for _ in range(10):
        chain, th, phi = _random_setup(rng)
        ph = project_horizontal(th, phi, params)
        gv = vertical_field(th, rng.normal(size=100))
        w = field_from_increments(th, phi)
        scale = np.sqrt(elastic_inner(w, w, th, params) * elastic_inner(gv, gv, th, params))
        assert abs(elastic_inner(ph, gv, th, params)) <= 1e-9 * scale


def test_project_zero(ellipse100):
    assert np.all(project_horizontal(ellipse100, np.zeros(100), P1) == 0)


def test_base_point_rotation_projection_is_first_order():
    # the rod-preserving rotation field is vertical only up to O(1/n); see the ledger
    ratios = []
    for n in (50, 100, 200, 400):
        th = generate_shape('circle', n).theta
        phi = np.full(n, 2 * np.pi)
        w = field_from_increments(th, phi)
        ph = project_horizontal(th, phi, P1)
        ratios.append(np.sqrt(elastic_inner(ph, ph, th, P1) / elastic_inner(w, w, th, P1)))
    ratios = np.array(ratios)
    assert np.all(ratios < 4 / np.array([50, 100, 200, 400]))
    assert np.allclose(ratios[:-1] / ratios[1:], 2, rtol=0.01)


@pytest.mark.parametrize('n', [6, 100])
def test_quotient_formulas_agree(rng, n):
    params = ElasticParams(rng.uniform(0.1, 10), rng.uniform(0.1, 10))
    chain = random_shape(rng, n, amplitude=0.1) if n > 6 else Chain(
        np.stack([np.cos(np.arange(6) * np.pi / 3), np.sin(np.arange(6) * np.pi / 3)], 1))
    th = chain.theta
    phi = closed_increments(th, rng.normal(size=n))
    psi = closed_increments(th, rng.normal(size=n))
    q1 = quotient_inner(th, phi, psi, params)
    q2 = quotient_inner_direct(th, phi, psi, params)
    assert abs(q1 - q2) <= 1e-10 * max(abs(q1), 1e-12) + 1e-14
    assert abs(quotient_inner(th, psi, phi, params) - q1) <= 1e-12 * max(abs(q1), 1)


def test_quotient_kills_vertical_component(rng):
    # psi generated by m v motion: horizontal increments of phi minus those of phi itself
    chain, th, phi = _random_setup(rng)
    inc = horizontal_increments(th, phi, P1)
    full = phi[:, None] * np.stack([-np.sin(th), np.cos(th)], 1) / 100
    vert = full - inc
    # the vertical part pairs to zero with any horizontal field
    _, _, psi = _random_setup(rng)
    hz = horizontal_increments(th, psi, P1)
    from elastica.metric import increment_inner
    assert abs(increment_inner(vert, hz, th, P1)) <= 1e-12 * np.abs(vert).max() * np.abs(hz).max() * 1e4


def test_pythagoras(rng):
    for a, b in [(1, 1), (100, 1), (0.01, 1)]:
        params = ElasticParams(a, b)
        chain, th, phi = _random_setup(rng)
        w = field_from_increments(th, phi)
        m = horizontal_m(th, phi, params)
        mv = vertical_field(th, m)
        lhs = elastic_inner(w, w, th, params)
        ph = w - mv
        rhs = elastic_inner(ph, ph, th, params) + elastic_inner(mv, mv, th, params)
        assert rhs == pytest.approx(lhs, rel=1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.floats(-np.pi, np.pi))
def test_rotation_invariance(seed, alpha):
    rng = np.random.default_rng(seed)
    chain, th, phi = _random_setup(rng, 40)
    w, z = rng.normal(size=(40, 2)), rng.normal(size=(40, 2))
    R = rot(alpha)
    rotated = Chain(chain.vertices @ R.T)
    base = elastic_inner(w, z, chain, P1)
    assert elastic_inner(w @ R.T, z @ R.T, rotated, P1) == pytest.approx(base, rel=1e-12, abs=1e-12)
    psi = closed_increments(th, rng.normal(size=40))
    q = quotient_inner(chain, phi, psi, P1)
    assert quotient_inner(rotated, phi, psi, P1) == pytest.approx(q, rel=1e-12, abs=1e-13)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 39))
def test_reindex_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    chain, th, phi = _random_setup(rng, 40)
    psi = closed_increments(th, rng.normal(size=40))
    w, z = rng.normal(size=(40, 2)), rng.normal(size=(40, 2))
    shifted = Chain(np.roll(chain.vertices, -shift, axis=0))
    r = lambda x: np.roll(x, -shift, axis=0)
    assert elastic_inner(r(w), r(z), shifted, P1) == pytest.approx(elastic_inner(w, z, chain, P1), rel=1e-12)
    q = quotient_inner(chain, phi, psi, P1)
    assert quotient_inner(shifted, r(phi), r(psi), P1) == pytest.approx(q, rel=1e-12, abs=1e-13)
    assert np.allclose(horizontal_m(shifted, r(phi), P1), r(horizontal_m(chain, phi, P1)), atol=1e-12)


def test_batched_m_matches_loop(rng):
    chains = [random_shape(rng, 30).theta for _ in range(4)]
    th = np.stack(chains)
    phi = rng.normal(size=(4, 30))
    batch = horizontal_m(th, phi, P1)
    for j in range(4):
        assert np.allclose(batch[j], horizontal_m(th[j], phi[j], P1), atol=1e-14)


def m_refinement(a=1.0, b=1.0, ns=(50, 100, 200, 400)):
    """Sup differences of m between successive doublings on the shared vertices.

    phi is a rod quantity, so phi(s) is sampled at the rod midpoints.
    """
    params = ElasticParams(a, b)
    diffs, prev = [], None
    for n in ns:
        th = generate_shape('circle', n).theta
        s = (np.arange(n) + 0.5) / n
        m = horizontal_m(th, np.cos(2 * np.pi * s), params)
        if prev is not None:
            diffs.append(np.max(np.abs(m[::2] - prev)))
        prev = m
    return np.array(diffs)


@pytest.mark.parametrize('a', [1.0, 100.0, 0.01])
def test_continuum_contraction(a):
    d = m_refinement(a)
    assert np.all(d[:-1] / d[1:] >= 2)
