"""
Random test paths and finite-difference self-checks of the gradient pipeline.
"""

from dataclasses import dataclass, field

import numpy as np

from .curves import PathOfChains, angle_path, chain_from_angles, close_angles, resample_arclength
from .gradient import (DEFAULT_ORDER, assemble_gradient, compute_xi, energy_from_angles,
                       gradient_pairing, integrate_time, path_energy, xi_to_beta)
from .metric import ElasticParams, field_from_increments, frame, horizontal_m, quotient_inner

__all__ = ['random_shape', 'random_path', 'closed_increments', 'random_variation',
           'CheckResult', 'run_gradcheck']


def random_shape(rng, n, amplitude=0.08, modes=4, samples=400):
    """Smooth star-shaped closed chain with random low-order Fourier radius."""
    phi = 2 * np.pi * np.arange(samples) / samples
    r = np.ones(samples)
    for f in range(2, modes + 2):
        r += amplitude / f * (rng.normal() * np.cos(f * phi) + rng.normal() * np.sin(f * phi))
    return resample_arclength(np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1), n)


def random_path(rng, n, n_t, amplitude=0.08):
    """Path from one random shape to another, bowed towards a third one.

    Interpolation happens on the lifted rod angles, each slice is then
    closed, so the path is smooth in t.
    """
    thetas = [random_shape(rng, n, amplitude).theta for _ in range(3)]
    ta, tb, tc = (th - 2 * np.pi * np.round((th[0] - thetas[0][0]) / (2 * np.pi)) for th in thetas)
    t = np.linspace(0.0, 1.0, n_t + 1)[:, None]
    theta = (1 - t) * ta + t * tb + 4 * t * (1 - t) * (tc - 0.5 * (ta + tb))
    theta[1:-1] = close_angles(theta[1:-1])
    theta[0], theta[-1] = ta, tb
    return PathOfChains(np.stack([chain_from_angles(th).vertices for th in theta]))


def closed_increments(theta, psi):
    """Remove from psi the part that prevents sum_k psi_k n_k = 0."""
    _, nrm = frame(theta)
    G = np.einsum('...ki,...kj->...ij', nrm, nrm)
    r = np.einsum('...k,...ki->...i', psi, nrm)
    lam = np.linalg.solve(G, r[..., None])[..., 0]
    return psi - np.einsum('...ki,...i->...k', nrm, lam)


def random_variation(rng, theta, smooth_in_k=False):
    """Rod-preserving closed vertex variation, zero at both endpoint slices.

    The time profile t (1 - t) (r0 + r1 t) is cubic, so the difference
    stencils resolve the variation itself exactly and the oracle only
    measures the error of the gradient.
    """
    N, n = theta.shape
    t = np.linspace(0.0, 1.0, N)[:, None]
    if smooth_in_k:
        s = np.arange(n) / n
        r0, r1 = (sum(rng.normal() * np.cos(2 * np.pi * f * s + rng.uniform(0, 2 * np.pi))
                      for f in range(1, 4)) for _ in range(2))
    else:
        r0, r1 = rng.normal(size=n), rng.normal(size=n)
    psi = 4 * t * (1 - t) * (r0 + r1 * (2 * t - 1))
    psi = closed_increments(theta, psi)
    psi[0] = psi[-1] = 0.0
    return psi, field_from_increments(theta, psi)


@dataclass
class CheckResult:
    name: str
    error: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def line(self):
        status = 'PASS' if self.passed else 'FAIL'
        return f'{status}  {self.name:<42s} error={self.error:.3e}  tol={self.tol:.1e}'


def _rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def check_xi(path, params, rng, h=1e-5, order=DEFAULT_ORDER, corrupt=None, scheme='continuous'):
    """Directional derivative of E along an angle variation vs sum psi xi / n."""
    ap = angle_path(path)
    xi = compute_xi(ap, params, order, scheme)
    if corrupt is not None:
        xi = corrupt(xi)
    xi[0] = xi[-1] = 0.0
    psi, _ = random_variation(rng, ap.theta)
    n = ap.n
    analytic = integrate_time((psi * xi).sum(-1) / n, ap.dt, order)
    fd = (energy_from_angles(ap.theta + h * psi, ap.dt, params, order=order)
          - energy_from_angles(ap.theta - h * psi, ap.dt, params, order=order)) / (2 * h)
    return _rel(analytic, fd), analytic, fd


def check_full_gradient(path, params, rng, h=1e-6, order=DEFAULT_ORDER, scheme='continuous'):
    """Central difference of E along a closed vertex variation vs the metric pairing."""
    ap = angle_path(path)
    _, V = random_variation(rng, ap.theta)
    grad = assemble_gradient(ap, params, order, scheme)
    pairing = gradient_pairing(ap, V, grad, params)
    plus = PathOfChains(path.vertices + h * V, path.T)
    minus = PathOfChains(path.vertices - h * V, path.T)
    fd = (path_energy(plus, params, order=order) - path_energy(minus, params, order=order)) / (2 * h)
    return _rel(pairing, fd), pairing, fd


def check_mdot(path, params, h=1e-5, order=DEFAULT_ORDER):
    """mdot from the differentiated projection equations vs differences of solved m."""
    ap = angle_path(path)
    xi, m, mdot, der = compute_xi(ap, params, order, return_aux=True)
    # m along the straight-line continuation theta + s * theta_dot at each slice
    th, td = ap.theta, der.theta_dot
    j = ap.n_t // 2
    # mdot uses theta_ddot too: continue quadratically in time
    tdd = der.theta_ddot

    def m_at(s):
        th_s = th[j] + s * td[j] + 0.5 * s * s * tdd[j]
        return horizontal_m(th_s, td[j] + s * tdd[j], params)
    fd = (m_at(h) - m_at(-h)) / (2 * h)
    scale = np.max(np.abs(fd))
    err = np.max(np.abs(fd - mdot[j]))
    return float(err / scale if scale > 0 else err), mdot[j], fd


def check_duality(theta, params, rng):
    """quotient_inner(alpha, beta) == sum alpha xi / n for the dualized beta."""
    n = theta.shape[-1]
    xi = rng.normal(size=n)
    alpha = rng.normal(size=n)
    beta, _ = xi_to_beta(theta, xi, params)
    lhs = quotient_inner(theta, alpha, beta, params)
    rhs = np.sum(alpha * xi) / n
    return _rel(lhs, rhs), lhs, rhs


SCHEME_LABELS = {'continuous': 'closed form', 'discrete': 'discrete adjoint'}


def run_gradcheck(seed=0, n=60, n_t=32, params=None, order=DEFAULT_ORDER, corrupt_xi=None,
                  tol=1e-3, schemes=('continuous', 'discrete'), path=None):
    """All finite-difference oracles on one random path; returns CheckResults.

    Both xi schemes are checked against the same random directions.
    """
    params = params or ElasticParams(1.0, 1.0)
    rng = np.random.default_rng(seed)
    if path is None:
        path = random_path(rng, n, n_t)
    state = rng.bit_generator.state
    results = []
    for scheme in schemes:
        rng.bit_generator.state = state
        label = SCHEME_LABELS[scheme]
        err, an, fd = check_xi(path, params, rng, order=order, corrupt=corrupt_xi, scheme=scheme)
        results.append(CheckResult(f'xi directional derivative, {label}', err, tol,
                                   {'analytic': an, 'fd': fd}))
        err, an, fd = check_full_gradient(path, params, rng, order=order, scheme=scheme)
        results.append(CheckResult(f'gradient pairing, {label}', err, tol,
                                   {'analytic': an, 'fd': fd}))
    err, _, _ = check_mdot(path, params, order=order)
    results.append(CheckResult('mdot vs differenced m', err, 1e-4))
    th = angle_path(path).theta[path.n_t // 2]
    err, an, fd = check_duality(th, params, rng)
    results.append(CheckResult('duality identity', err, 1e-8, {'lhs': an, 'rhs': fd}))
    grad = assemble_gradient(path, params, order)
    results.append(CheckResult('gradient closure', grad.closure_error(), 1e-12))
    return results
