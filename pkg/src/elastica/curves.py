"""
Discrete arc-length parameterized closed curves.

A closed curve is a chain of ``n`` vertices joined by rigid rods of length
``1/n`` (perimeter one).  Rod ``k`` runs from vertex ``k`` to vertex
``k+1`` (indices mod n) and has direction angle ``theta[k]``; the turning
angle at vertex ``k`` is ``theta[k] - theta[k-1]``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

__all__ = [
    'Chain', 'PathOfChains', 'AnglePath', 'ShapeError', 'LiftError',
    'wrap_angle', 'resample_arclength', 'resample_curve', 'angles_from_chain',
    'chain_from_angles', 'close_angles', 'angle_path', 'generate_shape', 'parse_shape',
    'build_linear_path', 'build_bump_path', 'sin2_profile', 'eccentricity',
    'family_params', 'CLOSURE_TOL', 'LIFT_MARGIN',
]

CLOSURE_TOL = 1e-8
LIFT_MARGIN = 0.1
MIN_PERIMETER = 1e-12


class ShapeError(ValueError):
    pass


class LiftError(ValueError):
    pass


def wrap_angle(x):
    """Map angles to [-pi, pi)."""
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class Chain:
    """Closed polygon with equal rods, stored as an (n, 2) vertex array."""

    vertices: np.ndarray
    closure_defect: float = 0.0

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f'vertices must have shape (n, 2), got {v.shape}')
        if v.shape[0] < 3:
            raise ValueError('a chain needs at least 3 vertices')
        v.setflags(write=False)
        object.__setattr__(self, 'vertices', v)

    @property
    def n(self):
        return self.vertices.shape[0]

    @property
    def closed(self):
        return self.closure_defect <= CLOSURE_TOL

    @cached_property
    def edges(self):
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def rod_lengths(self):
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @property
    def perimeter(self):
        return float(self.rod_lengths.sum())

    def rod_deviation(self):
        """max_k | n |gamma_{k+1} - gamma_k| - 1 |."""
        return float(np.max(np.abs(self.rod_lengths * self.n - 1.0)))

    @cached_property
    def theta(self):
        return angles_from_chain(self)

    @property
    def rotation_number(self):
        return int(round((self.theta[-1] - self.theta[0] + wrap_angle(self.theta[0] - self.theta[-1]))
                         / (2 * np.pi)))

    def check(self, rod_tol=1e-10):
        if not self.closed:
            raise ShapeError(f'chain is not closed (defect {self.closure_defect:.3e})')
        dev = self.rod_deviation()
        if dev > rod_tol:
            raise ShapeError(f'rod lengths deviate from 1/n by {dev:.3e} (relative)')
        return self

    def transformed(self, rotation=0.0, translation=(0.0, 0.0)):
        c, s = np.cos(rotation), np.sin(rotation)
        R = np.array([[c, -s], [s, c]])
        return Chain(self.vertices @ R.T + np.asarray(translation), self.closure_defect)

    def shifted(self, offset):
        """Same polygon with the base point moved forward by ``offset`` vertices."""
        return Chain(np.roll(self.vertices, -offset, axis=0), self.closure_defect)


@dataclass(frozen=True)
class PathOfChains:
    """Time-indexed chains, stored as a (N_t + 1, n, 2) array on t in [0, T]."""

    vertices: np.ndarray
    T: float = 1.0

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 3 or v.shape[2] != 2:
            raise ValueError(f'path vertices must have shape (N_t + 1, n, 2), got {v.shape}')
        if v.shape[0] < 2:
            raise ValueError('a path needs at least two slices')
        v.setflags(write=False)
        object.__setattr__(self, 'vertices', v)

    @property
    def n(self):
        return self.vertices.shape[1]

    @property
    def n_t(self):
        return self.vertices.shape[0] - 1

    @property
    def dt(self):
        return self.T / self.n_t

    @property
    def times(self):
        return np.linspace(0.0, self.T, self.n_t + 1)

    def slice(self, j):
        return Chain(self.vertices[j])

    @property
    def slices(self):
        return [self.slice(j) for j in range(self.n_t + 1)]

    def rod_deviation(self):
        e = np.roll(self.vertices, -1, axis=1) - self.vertices
        return float(np.max(np.abs(np.hypot(e[..., 0], e[..., 1]) * self.n - 1.0)))

    @classmethod
    def from_chains(cls, chains, T=1.0):
        ns = {c.n for c in chains}
        if len(ns) != 1:
            raise ValueError(f'all slices must share n, got {sorted(ns)}')
        return cls(np.stack([c.vertices for c in chains]), T)


@dataclass(frozen=True)
class AnglePath:
    """Lifted rod angles theta[j, k] of a path, continuous in k and in t."""

    theta: np.ndarray
    dt: float
    rotation_number: int = field(default=1)

    @property
    def n(self):
        return self.theta.shape[1]

    @property
    def n_t(self):
        return self.theta.shape[0] - 1

    @property
    def turning(self):
        """Turning angles Delta[j, k] = theta[j, k] - theta[j, k-1], wrapped."""
        return wrap_angle(self.theta - np.roll(self.theta, 1, axis=-1))


# ---------------------------------------------------------------------------
# angles <-> vertices


def angles_from_chain(chain, prev=None, margin=LIFT_MARGIN):
    """Lifted rod angles of a chain.

    The lift is continuous along k starting from ``atan2`` of the first rod,
    or, when ``prev`` is given, each angle is taken within pi of ``prev``.

    Raises
    ------
    LiftError
        If some turning angle is within ``margin`` of pi.
    """
    vertices = chain.vertices if isinstance(chain, Chain) else np.asarray(chain, dtype=float)
    e = np.roll(vertices, -1, axis=0) - vertices
    raw = np.arctan2(e[:, 1], e[:, 0])
    turning = wrap_angle(raw - np.roll(raw, 1))
    bad = np.flatnonzero(np.abs(turning) >= np.pi - margin)
    if bad.size:
        raise LiftError(f'turning angle {turning[bad[0]]:.3f} rad at vertex {bad[0]} is too close '
                        f'to pi; the chain is too coarse for a continuous lift, raise n')
    # always raw + 2 pi * integer, so equal chains lift to bitwise equal angles
    if prev is None:
        guide = raw[0] + np.concatenate([[0.0], np.cumsum(turning[1:])])
    else:
        guide = np.asarray(prev, dtype=float)
    theta = raw + 2 * np.pi * np.round((guide - raw) / (2 * np.pi))
    if prev is not None:
        lifted_turning = theta[1:] - theta[:-1]
        if np.any(np.abs(lifted_turning - turning[1:]) > 1e-9):
            raise LiftError('time-continuous lift breaks continuity along the curve; refine the path in t')
    return theta


def chain_from_angles(theta, base_point=(0.0, 0.0)):
    """Integrate unit rods of length 1/n; the closure defect is stored on the result."""
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[0]
    steps = np.stack([np.cos(theta), np.sin(theta)], axis=1) / n
    pts = np.asarray(base_point, dtype=float) + np.concatenate([[np.zeros(2)], np.cumsum(steps, axis=0)])
    defect = float(np.hypot(*(pts[-1] - pts[0])))
    return Chain(pts[:-1], closure_defect=defect)


def close_angles(theta, tol=1e-14, max_iter=50):
    """Nearest closed angle sequence: Gauss-Newton on sum_k (cos, sin)(theta_k) = 0.

    The correction lies in the span of sin(theta) and cos(theta), so the
    result depends smoothly on the input.
    """
    theta = np.array(theta, dtype=float)
    n = theta.shape[-1]
    for _ in range(max_iter):
        F = np.stack([np.cos(theta).sum(-1), np.sin(theta).sum(-1)], axis=-1) / n
        if np.max(np.abs(F)) <= tol:
            return theta
        J = np.stack([-np.sin(theta), np.cos(theta)], axis=-2) / n       # (..., 2, n)
        JJ = J @ np.swapaxes(J, -1, -2)
        lam = np.linalg.solve(JJ, F[..., None])
        theta = theta - (np.swapaxes(J, -1, -2) @ lam)[..., 0]
    raise ShapeError('closure projection did not converge')


def angle_path(path, margin=LIFT_MARGIN):
    """Lift every slice of a path, continuously in k and then in t."""
    thetas = []
    prev = None
    for j in range(path.n_t + 1):
        prev = angles_from_chain(path.vertices[j], prev=prev, margin=margin)
        thetas.append(prev)
    theta = np.array(thetas)
    rot = np.round((theta[:, -1] - theta[:, 0] + wrap_angle(theta[:, 0] - theta[:, -1])) / (2 * np.pi))
    if np.any(rot != rot[0]):
        raise LiftError('rotation number changes along the path')
    return AnglePath(theta, path.dt, int(rot[0]))


# ---------------------------------------------------------------------------
# resampling to equal rods


def _first_crossing_polyline(pts, cum, s0, p0, ell):
    """Smallest s > s0 with |c(s) - p0| = ell on the periodic polyline."""
    m = len(pts)
    L = cum[-1]
    period = np.floor(s0 / L)
    i = int(np.searchsorted(cum, s0 - period * L, side='right')) - 1
    r2 = ell * ell
    for _ in range(4 * m + 4):
        lap, seg = divmod(i, m)
        a = pts[seg]
        b = pts[(seg + 1) % m]
        s_a = (period + lap) * L + cum[seg]
        seglen = cum[seg + 1] - cum[seg]
        d = b - a
        f = a - p0
        # |f + u d|^2 = r^2 with u in [0, 1]
        A = d @ d
        B = 2 * (f @ d)
        C = f @ f - r2
        disc = B * B - 4 * A * C
        if disc >= 0:
            sq = np.sqrt(disc)
            for u in sorted(((-B - sq) / (2 * A), (-B + sq) / (2 * A))):
                # roundoff can push a crossing at a shared vertex just outside
                # both segments, so accept a sliver past each end
                if not -1e-12 <= u <= 1.0 + 1e-12:
                    continue
                u = min(max(u, 0.0), 1.0)
                s = s_a + u * seglen
                if s > s0 + 1e-15 * L:
                    # crossing must go from inside to outside the circle
                    if 2 * A * u + B >= 0:
                        return s, a + u * d
        i += 1
    raise ShapeError('no rod-length crossing found along the polygon')


def _walk(pts, cum, ell, n):
    s = 0.0
    p = pts[0]
    out = [p]
    for _ in range(n):
        s, p = _first_crossing_polyline(pts, cum, s, p, ell)
        out.append(p)
    return s, np.array(out)


def resample_arclength(polygon, n):
    """Resample a closed polygon to a chain of ``n`` equal rods of length 1/n.

    Vertices are placed on the polygon by walking from the first input
    vertex with a fixed chord length; the chord is tuned so that the walk
    closes after ``n`` rods.  The result is scaled about the origin to
    perimeter one.
    """
    pts = _clean_polygon(polygon)
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    L = seg.sum()
    if L < MIN_PERIMETER:
        raise ShapeError(f'degenerate polygon: perimeter {L:.3e} below {MIN_PERIMETER}')
    if n < 3:
        raise ShapeError(f'need n >= 3 rods, got {n}')
    cum = np.concatenate([[0.0], np.cumsum(seg)])

    def excess(ell):
        return _walk(pts, cum, ell, n)[0] - L

    hi = L / n
    # chords never exceed arcs, so excess(hi) >= 0 up to roundoff
    if excess(hi) <= 1e-14 * L:
        ell = hi
    else:
        lo = 0.5 * hi
        while excess(lo) > 0:
            lo *= 0.5
            if lo < 1e-6 * hi:
                raise ShapeError('could not bracket the rod length; polygon too irregular for n')
        ell = brentq(excess, lo, hi, xtol=1e-16 * L, rtol=8.9e-16, maxiter=200)
    _, out = _walk(pts, cum, ell, n)
    verts = out[:n] / (n * ell)
    defect = float(np.hypot(*(out[n] - out[0]))) / (n * ell)
    return Chain(verts, closure_defect=defect)


def _clean_polygon(polygon):
    pts = np.asarray(polygon, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ShapeError(f'polygon must have shape (m, 2), got {pts.shape}')
    if not np.all(np.isfinite(pts)):
        raise ShapeError('polygon has non-finite coordinates')
    keep = np.any(pts != np.roll(pts, 1, axis=0), axis=1)
    pts = pts[keep] if keep.any() else pts[:1]
    if len(np.unique(pts, axis=0)) < 3:
        raise ShapeError(f'degenerate polygon: {len(np.unique(pts, axis=0))} distinct vertices, need >= 3')
    return pts


def resample_curve(curve, n, samples=4000):
    """Equal-rod chain with vertices exactly on a parametric closed curve.

    ``curve`` maps parameters in [0, 1) (vectorized) to points; a table of
    ``samples`` points brackets each rod crossing, which is then refined on
    the exact curve.
    """
    u_tab = np.linspace(0.0, 1.0, samples + 1)
    tab = curve(u_tab[:-1])
    seg = np.hypot(*np.diff(np.vstack([tab, tab[:1]]), axis=0).T)
    L = seg.sum()
    if L < MIN_PERIMETER:
        raise ShapeError(f'degenerate curve: perimeter {L:.3e}')

    def point(u):
        return curve(np.atleast_1d(u % 1.0))[0]

    def step(u0, p0, ell):
        j = int(np.floor(u0 * samples)) + 1
        for _ in range(2 * samples + 2):
            q = tab[j % samples]
            if np.hypot(*(q - p0)) >= ell:
                lo = max(u0, (j - 1) / samples)
                f = lambda u: np.hypot(*(point(u) - p0)) - ell
                if f(lo) >= 0:
                    lo = u0
                u = brentq(f, lo, j / samples, xtol=1e-16, rtol=8.9e-16, maxiter=200)
                return u, point(u)
            j += 1
        raise ShapeError('no rod-length crossing found along the curve')

    def walk(ell):
        u, p = 0.0, point(0.0)
        out = [p]
        for _ in range(n):
            u, p = step(u, p, ell)
            out.append(p)
        return u, np.array(out)

    hi = L / n * 1.001
    lo = 0.5 * L / n
    ell = brentq(lambda e: walk(e)[0] - 1.0, lo, hi, xtol=1e-17, rtol=8.9e-16, maxiter=200)
    _, out = walk(ell)
    return Chain(out[:n] / (n * ell), closure_defect=float(np.hypot(*(out[n] - out[0]))) / (n * ell))


# ---------------------------------------------------------------------------
# shapes


def _superellipse(p, ax=1.0, ay=1.0, rotation=0.0):
    # polar form r(phi) = (|cos phi / ax|^p + |sin phi / ay|^p)^(-1/p): regular for every p
    def curve(u):
        w = 2 * np.pi * np.asarray(u)
        c, s = np.cos(w), np.sin(w)
        r = (np.abs(c / ax) ** p + np.abs(s / ay) ** p) ** (-1.0 / p)
        x, y = r * c, r * s
        if rotation:
            cr, sr = np.cos(rotation), np.sin(rotation)
            x, y = cr * x - sr * y, sr * x + cr * y
        return np.stack([x, y], axis=-1)
    return curve


FAMILY_MAX_ECC = 0.8
FAMILY_MAX_EXPONENT = 6.0


def family_params(u, v):
    """Ellipse eccentricity and superellipse exponent of family member (u, v).

    ``u`` in [-1, 1] stretches the circle into an ellipse with eccentricity
    ``|u| * 0.8``, major axis along x for u > 0 and along y for u < 0.
    ``v`` in [-1, 1] squares it: exponent ``2 + 4|v|``, with the square
    turned by 45 degrees for v < 0.
    """
    if not (-1 <= u <= 1 and -1 <= v <= 1):
        raise ShapeError(f'family parameters out of range: u={u}, v={v}')
    return abs(u) * FAMILY_MAX_ECC, 2.0 + (FAMILY_MAX_EXPONENT - 2.0) * abs(v)


def _family_curve(u, v):
    ecc, p = family_params(u, v)
    minor = np.sqrt(1.0 - ecc ** 2)
    ax, ay = (1.0, minor) if u >= 0 else (minor, 1.0)
    if v >= 0:
        return _superellipse(p, ax, ay)
    # rotated square, parameterized so that u = 0 lies on the positive x axis
    base = _superellipse(p, 1.0, 1.0, rotation=np.pi / 4)
    scale = np.array([ax, ay])

    def curve(w):
        return base(np.asarray(w) - 0.125) * scale
    return curve


def parse_shape(spec):
    """Parse ``circle``, ``ellipse:0.8``, ``superellipse:4``, ``family:0.5,-1``."""
    if isinstance(spec, (tuple, list)):
        return tuple(spec)
    name, _, args = str(spec).partition(':')
    name = name.strip().lower()
    try:
        vals = tuple(float(a) for a in args.split(',')) if args else ()
    except ValueError:
        raise ShapeError(f'bad shape parameters in {spec!r}') from None
    arity = {'circle': 0, 'ellipse': 1, 'superellipse': 1, 'family': 2}
    if name not in arity:
        raise ShapeError(f'unknown shape {name!r}')
    if len(vals) != arity[name]:
        raise ShapeError(f'shape {name!r} takes {arity[name]} parameter(s), got {len(vals)}')
    return (name,) + vals


def generate_shape(spec, n=100):
    """Equal-rod chain for an analytic shape, base point on the positive x axis.

    ``spec`` is a string understood by :func:`parse_shape` or a tuple such
    as ``('ellipse', 0.8)``.
    """
    name, *args = parse_shape(spec)
    if n < 8:
        raise ShapeError(f'need n >= 8, got {n}')
    if name == 'circle':
        theta = 2 * np.pi * np.arange(n) / n
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return Chain(pts / (2 * n * np.sin(np.pi / n)))
    if name == 'ellipse':
        (e,) = args
        if not 0 <= e < 1:
            raise ShapeError(f'eccentricity must lie in [0, 1), got {e}')
        if e == 0:
            return generate_shape('circle', n)
        return resample_curve(_superellipse(2.0, 1.0, np.sqrt(1 - e * e)), n)
    if name == 'superellipse':
        (p,) = args
        if p < 2:
            raise ShapeError(f'superellipse exponent must be >= 2, got {p}')
        if p == 2:
            return generate_shape('circle', n)
        return resample_curve(_superellipse(p), n)
    u, v = args
    family_params(u, v)
    if u == 0 and v == 0:
        return generate_shape('circle', n)
    return resample_curve(_family_curve(u, v), n)


def eccentricity(chain):
    """Eccentricity of the ellipse sharing the chain's second area moments."""
    P = chain.vertices if isinstance(chain, Chain) else np.asarray(chain)
    x, y = P[:, 0], P[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    A = cross.sum() / 2
    cx = ((x + x1) * cross).sum() / (6 * A)
    cy = ((y + y1) * cross).sum() / (6 * A)
    Ixx = ((x * x + x * x1 + x1 * x1) * cross).sum() / 12 - A * cx * cx
    Iyy = ((y * y + y * y1 + y1 * y1) * cross).sum() / 12 - A * cy * cy
    Ixy = ((x * y1 + 2 * x * y + 2 * x1 * y1 + x1 * y) * cross).sum() / 24 - A * cx * cy
    lam = np.linalg.eigvalsh(np.array([[Ixx, Ixy], [Ixy, Iyy]]) / A)
    return float(np.sqrt(max(0.0, 1.0 - lam[0] / lam[1])))


# ---------------------------------------------------------------------------
# initial paths


def sin2_profile(t):
    return np.sin(np.pi * np.asarray(t)) ** 2


def _interpolated_path(chain_a, chain_b, weights, resample, T):
    if chain_a.n != chain_b.n:
        raise ValueError(f'chains differ in n: {chain_a.n} vs {chain_b.n}')
    if np.array_equal(chain_a.vertices, chain_b.vertices):
        return PathOfChains(np.repeat(chain_a.vertices[None], len(weights), axis=0), T)
    slices = []
    for j, w in enumerate(weights):
        if j == 0:
            slices.append(chain_a.vertices)
            continue
        if j == len(weights) - 1 and w == 1.0:
            slices.append(chain_b.vertices)
            continue
        if w == 0.0:
            slices.append(chain_a.vertices)
            continue
        mixed = (1.0 - w) * chain_a.vertices + w * chain_b.vertices
        if resample:
            try:
                mixed = resample_arclength(mixed, chain_a.n).vertices
            except ShapeError as exc:
                raise ShapeError(f'slice {j}: {exc}') from None
        else:
            perim = np.hypot(*(np.roll(mixed, -1, axis=0) - mixed).T).sum()
            if perim < MIN_PERIMETER:
                raise ShapeError(f'slice {j}: degenerate (perimeter {perim:.3e})')
        slices.append(mixed)
    return PathOfChains(np.stack(slices), T)


def build_linear_path(chain_a, chain_b, n_t, resample=True, T=1.0):
    """Vertexwise linear interpolation, each interior slice optionally resampled."""
    w = np.arange(n_t + 1) / n_t
    return _interpolated_path(chain_a, chain_b, w, resample, T)


def build_bump_path(base, peak, n_t, profile=sin2_profile, T=1.0):
    """Path from ``base`` through ``peak`` (at t = 1/2) and back to ``base``."""
    w = np.asarray(profile(np.arange(n_t + 1) / n_t), dtype=float)
    w[0] = w[-1] = 0.0
    return _interpolated_path(base, peak, w, True, T)
