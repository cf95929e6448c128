"""
Discrete elastic inner product, horizontal projection and quotient metric.

Fields along a chain are (n, 2) arrays of vertex displacements.  A field
preserving rod lengths is described by its normal increments ``phi`` with
``n (w[k+1] - w[k]) = phi[k] * normal[k]``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import Chain, wrap_angle
from .tridiag import CyclicTridiagonal, NearSingularError, solve_cyclic, solve_dense

__all__ = [
    'ElasticParams', 'frame', 'turning', 'field_from_increments', 'increments_of',
    'elastic_inner', 'increment_inner', 'horizontal_increments', 'projection_system', 'horizontal_m', 'project_horizontal',
    'quotient_inner', 'quotient_inner_direct', 'vertical_field',
]


@dataclass(frozen=True)
class ElasticParams:
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError(f'elastic weights must be positive and finite, got a={self.a}, b={self.b}')

    def scaled(self, lam):
        return ElasticParams(lam * self.a, lam * self.b)


def _theta(chain):
    if isinstance(chain, Chain):
        return chain.theta
    return np.asarray(chain, dtype=float)


def frame(theta):
    """Unit tangents and normals (n, 2) of the rods."""
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c, s], axis=-1), np.stack([-s, c], axis=-1)


def turning(theta):
    return wrap_angle(theta - np.roll(theta, 1, axis=-1))


def field_from_increments(theta, phi, start=(0.0, 0.0)):
    """Vertex field with ``n (w[k+1] - w[k]) = phi[k] normal[k]``, ``w[0] = start``.

    The field is only cyclically consistent when sum(phi * normal) = 0; the
    last increment is dropped otherwise.
    """
    theta = _theta(theta)
    n = theta.shape[-1]
    _, nrm = frame(theta)
    inc = np.asarray(phi)[..., None] * nrm / n
    w = np.concatenate([np.zeros_like(inc[..., :1, :]), np.cumsum(inc[..., :-1, :], axis=-2)], axis=-2)
    return w + np.asarray(start)


def increments_of(w):
    return np.roll(w, -1, axis=-2) - w


def elastic_inner(w, z, chain, params):
    """n * sum_k [a <dw_k, v_k><dz_k, v_k> + b <dw_k, n_k><dz_k, n_k>] for vertex fields."""
    theta = _theta(chain)
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    n = theta.shape[-1]
    if w.shape[-2:] != (n, 2) or z.shape[-2:] != (n, 2):
        raise ValueError(f'field shapes {w.shape}, {z.shape} do not match chain with n={n}')
    return increment_inner(increments_of(w), increments_of(z), theta, params)


def increment_inner(dw, dz, theta, params):
    """Elastic product from rod increments; fields need not close up."""
    n = theta.shape[-1]
    v, nrm = frame(theta)
    tang = np.sum(dw * v, -1) * np.sum(dz * v, -1)
    norm = np.sum(dw * nrm, -1) * np.sum(dz * nrm, -1)
    return n * np.sum(params.a * tang + params.b * norm, axis=-1)


def horizontal_increments(theta, phi, params):
    """Rod increments of ``w - m v`` for the field with normal increments ``phi``."""
    theta = _theta(theta)
    n = theta.shape[-1]
    v, nrm = frame(theta)
    m = horizontal_m(theta, phi, params)
    mv = m[..., None] * v
    return np.asarray(phi)[..., None] * nrm / n + increments_of(-mv)


def projection_system(theta, params):
    """Cyclic tridiagonal matrix of the horizontal-projection equations."""
    delta = turning(theta)
    c, s = np.cos(delta), np.sin(delta)
    a, b = params.a, params.b
    return CyclicTridiagonal(a + a * c * c + b * s * s, -a * c)


def _solve(system, rhs, what):
    try:
        return solve_cyclic(system, rhs)
    except NearSingularError as exc:
        warnings.warn(f'{what}: {exc}; falling back to dense elimination', RuntimeWarning, stacklevel=3)
        return solve_dense(system, rhs)


def horizontal_m(chain, phi, params):
    """Tangential coefficients m of the vertical part of a rod-preserving field.

    Solves, cyclically in k,
    ``(b/n) sin(D_k) phi_{k-1} = (a + a cos^2 D_k + b sin^2 D_k) m_k
    - a cos(D_k) m_{k-1} - a cos(D_{k+1}) m_{k+1}``.
    Accepts batched angle arrays (..., n).
    """
    theta = _theta(chain)
    phi = np.asarray(phi, dtype=float)
    n = theta.shape[-1]
    if phi.shape[-1] != n:
        raise ValueError(f'phi has {phi.shape[-1]} entries, chain has n={n}')
    rhs = params.b / n * np.sin(turning(theta)) * np.roll(phi, 1, axis=-1)
    return _solve(projection_system(theta, params), rhs, 'horizontal projection')


def vertical_field(chain, g):
    """Field g_k v_k."""
    v, _ = frame(_theta(chain))
    return np.asarray(g)[..., None] * v


def project_horizontal(chain, phi, params, start=(0.0, 0.0)):
    """Horizontal part ``w_k - m_k v_k`` of the rod-preserving field given by ``phi``."""
    theta = _theta(chain)
    w = field_from_increments(theta, phi, start)
    m = horizontal_m(theta, phi, params)
    return w - vertical_field(theta, m)


def quotient_inner(chain, phi, psi, params):
    """Quotient-metric product of two rod-preserving fields given by increments.

    Uses the closed form ``sum_k b phi_k (psi_k / n - h_{k+1} sin D_{k+1})``
    with h the projection coefficients of ``psi``.
    """
    theta = _theta(chain)
    n = theta.shape[-1]
    h = horizontal_m(theta, psi, params)
    s1 = np.roll(np.sin(turning(theta)), -1, axis=-1)
    return np.sum(params.b * np.asarray(phi) * (np.asarray(psi) / n - np.roll(h, -1, axis=-1) * s1), axis=-1)


def quotient_inner_direct(chain, phi, psi, params):
    """Same product evaluated as G(P_h w, P_h z) from the projected increments."""
    theta = _theta(chain)
    return increment_inner(horizontal_increments(theta, phi, params),
                           horizontal_increments(theta, psi, params), theta, params)
