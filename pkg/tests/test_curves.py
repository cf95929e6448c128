import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from elastica.checks import random_shape
from elastica.curves import (Chain, LiftError, PathOfChains, ShapeError, angle_path, angles_from_chain,
                             build_bump_path, build_linear_path, chain_from_angles, close_angles,
                             eccentricity, family_params, generate_shape, parse_shape,
                             resample_arclength, resample_curve, _superellipse)


def regular(n, r=1.0, clockwise=False):
    t = 2 * np.pi * np.arange(n) / n
    if clockwise:
        t = -t
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=1)


def test_regular_polygon_is_fixed_point():
    n = 24
    poly = regular(n) / (2 * n * np.sin(np.pi / n))
    out = resample_arclength(poly, n)
    assert np.max(np.abs(out.vertices - poly)) <= 1e-14


def test_scaling_commutes(rng):
    poly = random_shape(rng, 50).vertices + rng.normal(scale=0.001, size=(50, 2))
    a = resample_arclength(poly, 37).vertices
    b = resample_arclength(5 * poly, 37).vertices
    assert np.max(np.abs(a - b)) <= 1e-14


def bisection_points(poly, n):
    # independent oracle: cumulative-length table + bisection for s = k L / n
    closed = np.vstack([poly, poly[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    cum = np.concatenate([[0], np.cumsum(seg)])
    L = cum[-1]
    out = []
    for k in range(n):
        s = k * L / n
        lo, hi = 0, len(seg)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if cum[mid] <= s:
                lo = mid
            else:
                hi = mid
        f = (s - cum[lo]) / seg[lo]
        out.append(closed[lo] + f * (closed[lo + 1] - closed[lo]))
    return np.array(out) / L


def test_unit_square_eight_points():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    out = resample_arclength(square, 8)
    assert np.max(np.abs(out.vertices - bisection_points(square, 8))) <= 1e-14
    assert out.check(rod_tol=1e-14)


def test_base_point_preserved(rng):
    poly = random_shape(rng, 40).vertices * 3 + 0.1
    out = resample_arclength(poly, 40)
    L = np.sum(np.hypot(*(np.roll(poly, -1, 0) - poly).T))
    # first vertex kept, up to the scaling to perimeter one (polygon vs chain perimeter)
    ratio = out.vertices[0] / poly[0]
    assert abs(ratio[0] - ratio[1]) <= 1e-13
    assert ratio[0] == pytest.approx(1 / L, rel=1e-3)


def test_vertices_lie_on_polygon(rng):
    poly = random_shape(rng, 15, amplitude=0.2, samples=15).vertices
    out = resample_arclength(poly, 40)
    s = np.hypot(*(out.vertices[0])) / np.hypot(*poly[0])
    P = poly * s
    for q in out.vertices:
        a, b = P, np.roll(P, -1, axis=0)
        d = b - a
        t = np.clip(np.einsum('ij,ij->i', q - a, d) / np.einsum('ij,ij->i', d, d), 0, 1)
        dist = np.min(np.hypot(*(a + t[:, None] * d - q).T))
        assert dist <= 1e-14


@pytest.mark.parametrize('poly, what', [
    (np.zeros((5, 2)), 'distinct'),
    (np.array([[0, 0], [1, 0], [1, 0], [0, 0]], float), 'distinct'),
    (np.array([[0, 0], [1e-14, 0], [0, 1e-14]]), 'perimeter'),
])
def test_degenerate_polygons_rejected(poly, what):
    with pytest.raises(ShapeError, match=what):
        resample_arclength(poly, 10)


@given(st.integers(0, 2 ** 32 - 1), st.integers(12, 80))
def test_resample_idempotent(seed, n):
    chain = random_shape(np.random.default_rng(seed), n, amplitude=0.15)
    again = resample_arclength(chain.vertices, n)
    assert np.max(np.abs(again.vertices - chain.vertices)) <= 1e-12
    assert chain.check()


def test_regular_angles():
    n = 30
    chain = Chain(regular(n) / (2 * n * np.sin(np.pi / n)))
    theta = angles_from_chain(chain)
    assert np.allclose(np.diff(theta), 2 * np.pi / n, atol=1e-13)
    assert chain.rotation_number == 1
    assert Chain(regular(n, clockwise=True)).rotation_number == -1


def test_ellipse_round_trip(ellipse100):
    theta = angles_from_chain(ellipse100)
    back = chain_from_angles(theta, ellipse100.vertices[0])
    assert np.max(np.abs(back.vertices - ellipse100.vertices)) <= 1e-12


def test_chain_from_angles_cases():
    n = 40
    reg = chain_from_angles(2 * np.pi * np.arange(n) / n)
    assert reg.closure_defect <= 1e-14 and reg.closed
    assert np.allclose(reg.rod_lengths, 1 / n, rtol=1e-14)
    straight = chain_from_angles(np.zeros(n))
    assert straight.closure_defect == pytest.approx(1.0)
    assert not straight.closed


def test_random_round_trip_modulo_translation(rng):
    chain = random_shape(rng, 64, amplitude=0.2)
    back = chain_from_angles(angles_from_chain(chain))
    shift = chain.vertices[0]
    assert np.max(np.abs(back.vertices + shift - chain.vertices)) <= 1e-12


@given(st.integers(0, 2 ** 32 - 1))
def test_angles_identity_on_slices(seed):
    chain = random_shape(np.random.default_rng(seed), 50, amplitude=0.15)
    theta = close_angles(angles_from_chain(chain))
    again = angles_from_chain(chain_from_angles(theta))
    assert np.max(np.abs(again - theta)) <= 1e-12


def test_coarse_chain_rejected():
    zigzag = np.array([[0, 0], [1, 0], [0.02, 0.05], [1, 0.1], [0, 0.15]], float)
    with pytest.raises(LiftError, match='raise n'):
        angles_from_chain(zigzag)


def test_circle_generation():
    c = generate_shape('circle', 100)
    assert c.n == 100
    assert c.perimeter == pytest.approx(1.0, abs=1e-14)
    assert c.check()
    assert np.array_equal(generate_shape(('ellipse', 0.0), 100).vertices, c.vertices)
    assert np.array_equal(generate_shape('superellipse:2', 100).vertices, c.vertices)
    assert np.array_equal(generate_shape('family:0,0', 100).vertices, c.vertices)


def test_ellipse_vertices_on_curve_with_equal_rods(ellipse100):
    e = 0.8
    c = np.sqrt(1 - e * e)
    # the ellipse x = d cos u, y = c d sin u; d is fixed by the rod length
    x, y = ellipse100.vertices.T
    q = x ** 2 + (y / c) ** 2
    assert np.ptp(q) / q.mean() <= 1e-10
    d = np.sqrt(q.mean())
    assert ellipse100.rod_deviation() <= 1e-10
    # quadrature arc lengths between vertices: order preserved, arc >= chord, and
    # arc - chord bounded by the curvature of the ellipse
    u = np.unwrap(np.arctan2(y / c, x))
    arcs = np.array([quad(lambda s: d * np.hypot(np.sin(s), c * np.cos(s)), u[k], u[k + 1],
                          epsabs=1e-15)[0] for k in range(99)])
    chord = 1 / 100
    kmax = 1 / (c * c * d)
    assert np.all(arcs >= chord - 1e-13)
    assert np.all(arcs - chord <= kmax ** 2 * chord ** 3 / 24 * 1.01)
    assert eccentricity(ellipse100) == pytest.approx(0.8, abs=1e-3)


@pytest.mark.parametrize('spec', ['ellipse:1.2', 'ellipse:-0.1', 'superellipse:1.5', 'family:2,0',
                                  'blob', 'ellipse', 'circle:3'])
def test_bad_specs_rejected(spec):
    with pytest.raises(ShapeError):
        generate_shape(spec, 50)


def test_small_n_rejected():
    with pytest.raises(ShapeError, match='n >= 8'):
        generate_shape('circle', 6)


def test_parse_shape():
    assert parse_shape('family:0.5,-1') == ('family', 0.5, -1.0)
    assert parse_shape(('ellipse', 0.3)) == ('ellipse', 0.3)


def test_family_axes():
    assert family_params(0, 0) == (0.0, 2.0)
    assert family_params(1, 0)[0] == pytest.approx(0.8)
    assert family_params(0, -1)[1] == pytest.approx(6.0)
    ell = generate_shape(('family', 0.5, 0), 100)
    assert eccentricity(ell) == pytest.approx(0.4, abs=1e-3)
    sq = generate_shape(('family', 0, 1), 100)
    assert eccentricity(sq) < 1e-6
    assert sq.check()


@pytest.mark.parametrize('spec', ['ellipse:0.8', 'superellipse:5', 'family:-0.6,0.7'])
def test_density_invariance(spec):
    a = generate_shape(spec, 60)
    from elastica.curves import _family_curve
    name, *args = parse_shape(spec)
    curve = {'ellipse': lambda: _superellipse(2.0, 1.0, np.sqrt(1 - args[0] ** 2)),
             'superellipse': lambda: _superellipse(args[0]),
             'family': lambda: _family_curve(*args)}[name]()
    b = resample_curve(curve, 60, samples=40000)
    assert np.max(np.abs(a.vertices - b.vertices)) <= 1e-8


@pytest.mark.parametrize('spec', ['circle', 'ellipse:0.95', 'superellipse:8', 'family:-1,-1',
                                  'family:0.3,0.4'])
def test_convex_rotation_number(spec):
    assert abs(generate_shape(spec, 80).rotation_number) == 1


def test_linear_path_constant_when_equal(circle100):
    p = build_linear_path(circle100, circle100, 10)
    assert all(np.array_equal(s, circle100.vertices) for s in p.vertices)


def test_linear_path_translation(circle100):
    moved = Chain(circle100.vertices + np.array([0.3, -0.2]))
    p = build_linear_path(circle100, moved, 8)
    for j, s in enumerate(p.slices):
        shifted = s.vertices - s.vertices.mean(axis=0)
        assert np.max(np.abs(shifted - (circle100.vertices - circle100.vertices.mean(0)))) <= 1e-12
    assert np.array_equal(p.vertices[0], circle100.vertices)
    assert np.array_equal(p.vertices[-1], moved.vertices)


def test_linear_path_slices_valid(circle100, ellipse100):
    p = build_linear_path(circle100, ellipse100, 20)
    for s in p.slices:
        assert s.check()
    assert angle_path(p).rotation_number == 1


def test_linear_path_degenerate_slice_named():
    a = Chain(regular(10))
    b = Chain(-regular(10))
    with pytest.raises(ShapeError, match='slice 2'):
        build_linear_path(a, b, 4)


def test_bump_path(circle100):
    zero = build_bump_path(circle100, generate_shape('ellipse:0.5', 100), 10, profile=lambda t: 0 * t)
    assert all(np.array_equal(s, circle100.vertices) for s in zero.vertices)
    same = build_bump_path(circle100, circle100, 10)
    assert all(np.array_equal(s, circle100.vertices) for s in same.vertices)
    p = build_bump_path(circle100, generate_shape('ellipse:0.884', 100), 20)
    assert eccentricity(p.slice(10)) == pytest.approx(0.884, abs=2e-3)
    assert np.array_equal(p.vertices[0], circle100.vertices)
    assert np.array_equal(p.vertices[-1], circle100.vertices)


def test_path_validation():
    with pytest.raises(ValueError):
        PathOfChains(np.zeros((3, 5)))
    with pytest.raises(ValueError):
        PathOfChains(np.zeros((1, 5, 2)))
