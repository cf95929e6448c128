"""
Path straightening: gradient descent on the path energy with fixed endpoints.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import LiftError, PathOfChains, ShapeError, resample_arclength
from .gradient import DEFAULT_ORDER, assemble_gradient, path_energy
from .metric import ElasticParams
from .tridiag import NearSingularError

__all__ = ['StraightenConfig', 'StraightenReport', 'straighten', 'auto_step', 'descent_step']

DIVERGENCE_FACTOR = 10.0
MAX_HALVINGS = 30

# failures that mean the trial path left the region where the energy is defined
_NUMERICAL = (LiftError, ShapeError, NearSingularError, FloatingPointError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class StraightenConfig:
    """Descent settings.

    ``delta=None`` picks the first step with :func:`auto_step`.  After an
    accepted first-try step the step is multiplied by ``grow`` (line search
    only), so a step that was halved early can recover.  With line search,
    no vertex moves more than ``max_move`` rod lengths in one iteration;
    this bounds the second-order drift of the rod lengths between
    reprojections.

    The descent uses second-order time differences with the trapezoidal
    rule by default: the Simpson weights of ``order=4`` make the exact
    discrete gradient oscillate from slice to slice, and the descent then
    feeds that oscillation instead of flattening the path.
    """

    params: ElasticParams = field(default_factory=ElasticParams)
    delta: float | None = None
    max_iters: int = 1000
    grad_tol: float = 1e-3
    reproject_every: int = 50
    line_search: bool = True
    trace_every: int = 1
    target: float = 0.05
    grow: float = 1.25
    max_move: float = 0.05
    order: int = 2
    scheme: str = 'discrete'

    def __post_init__(self):
        if self.delta is not None and not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f'step delta must be positive, got {self.delta}')
        if self.max_iters < 1:
            raise ValueError(f'max_iters must be >= 1, got {self.max_iters}')
        if not self.grad_tol > 0:
            raise ValueError(f'grad_tol must be positive, got {self.grad_tol}')
        if self.reproject_every < 0:
            raise ValueError(f'reproject_every must be >= 0, got {self.reproject_every}')
        if self.trace_every < 1:
            raise ValueError(f'trace_every must be >= 1, got {self.trace_every}')
        if not self.target > 0:
            raise ValueError(f'auto-step target must be positive, got {self.target}')
        if not self.max_move > 0:
            raise ValueError(f'max_move must be positive, got {self.max_move}')
        if self.order not in (2, 4):
            raise ValueError(f'order must be 2 or 4, got {self.order}')
        if self.scheme not in ('continuous', 'discrete'):
            raise ValueError(f"scheme must be 'continuous' or 'discrete', got {self.scheme!r}")
        if not self.grow >= 1:
            raise ValueError(f'grow must be >= 1, got {self.grow}')


@dataclass
class StraightenReport:
    status: str
    final_path: PathOfChains
    iterations: int
    trace_iters: np.ndarray
    energy_trace: np.ndarray
    grad_norm_trace: np.ndarray
    rod_deviation_trace: np.ndarray
    delta: float
    message: str = ''

    @property
    def initial_energy(self):
        return float(self.energy_trace[0])

    @property
    def final_energy(self):
        return float(self.energy_trace[-1])


def auto_step(path, params, target=0.05, grad=None, order=DEFAULT_ORDER, scheme='continuous'):
    """Step size moving the fastest vertex by ``target`` rod lengths."""
    if not target > 0:
        raise ValueError(f'auto-step target must be positive, got {target}')
    if grad is None:
        grad = assemble_gradient(path, params, order, scheme)
    peak = float(np.max(np.linalg.norm(grad.z, axis=-1)))
    if not peak > 0 or not math.isfinite(peak):
        raise ValueError('gradient is zero or not finite; no step size defined')
    return target / path.n / peak


def descent_step(vertices, z, delta, reproject=False):
    """Interior slices move by -delta z, then are scaled to perimeter 1 about the origin."""
    out = np.array(vertices, dtype=float)
    inner = out[1:-1] - delta * z[1:-1]
    edges = np.roll(inner, -1, axis=1) - inner
    perim = np.hypot(edges[..., 0], edges[..., 1]).sum(axis=1)
    inner /= perim[:, None, None]
    if reproject:
        n = inner.shape[1]
        inner = np.stack([resample_arclength(s, n).vertices for s in inner])
    out[1:-1] = inner
    return out


def _energy(vertices, cfg, T):
    try:
        with np.errstate(over='raise', invalid='raise', divide='raise'):
            return path_energy(PathOfChains(vertices, T), cfg.params, order=cfg.order)
    except _NUMERICAL:
        return math.inf


def straighten(initial, config=None, callback=None):
    """Descend the path energy from ``initial``.

    Slices 0 and N_t are copied bitwise from ``initial`` on every step.  With
    ``line_search`` the step is halved (at most 30 times) until the energy
    decreases; a failed search ends the run with status ``stalled``.
    ``callback(iteration, path, energy)`` is called on every traced iteration.
    """
    cfg = config or StraightenConfig()
    T = initial.T
    verts = np.array(initial.vertices)
    rec_it, rec_e, rec_g, rec_r = [], [], [], []

    def record(it, path, grad):
        rec_it.append(it)
        rec_e.append(grad.energy)
        rec_g.append(grad.norm)
        rec_r.append(path.rod_deviation())
        if callback is not None:
            callback(it, path, grad.energy)

    def report(status, path, it, delta, message=''):
        return StraightenReport(status, path, it, np.array(rec_it), np.array(rec_e),
                                np.array(rec_g), np.array(rec_r), delta, message)

    path = initial
    grad = assemble_gradient(path, cfg.params, cfg.order, cfg.scheme)
    record(0, path, grad)
    e0 = grad.energy
    if not math.isfinite(e0) or not math.isfinite(grad.norm):
        return report('diverged', path, 0, math.nan, 'non-finite energy or gradient at iteration 0')
    if grad.norm <= cfg.grad_tol:
        return report('converged', path, 0, math.nan)
    delta = cfg.delta if cfg.delta is not None else auto_step(path, cfg.params, cfg.target, grad)

    energy = e0
    for it in range(1, cfg.max_iters + 1):
        reproject = cfg.reproject_every > 0 and it % cfg.reproject_every == 0
        halvings = MAX_HALVINGS if cfg.line_search else 0
        if cfg.line_search:
            delta = min(delta, auto_step(path, cfg.params, cfg.max_move, grad))
        for attempt in range(halvings + 1):
            try:
                trial = descent_step(verts, grad.z, delta, reproject)
            except ShapeError:
                trial, e_trial = None, math.inf
            else:
                e_trial = _energy(trial, cfg, T)
            if not cfg.line_search or e_trial < energy:
                break
            delta *= 0.5
        else:
            return report('stalled', path, it - 1, delta,
                          f'line search found no decrease after {MAX_HALVINGS} halvings')
        if cfg.line_search and attempt == 0:
            delta *= cfg.grow

        if trial is None:
            return report('diverged', path, it, delta, f'iteration {it}: degenerate slice')
        verts = trial
        path = PathOfChains(verts, T)
        try:
            grad = assemble_gradient(path, cfg.params, cfg.order, cfg.scheme)
        except _NUMERICAL as exc:
            return report('diverged', path, it, delta, f'iteration {it}: {exc}')
        energy = grad.energy
        bad = not (math.isfinite(energy) and math.isfinite(grad.norm))
        if bad or energy > DIVERGENCE_FACTOR * e0:
            if not bad:
                record(it, path, grad)
            return report('diverged', path, it, delta,
                          f'iteration {it}: energy {energy:.6g} vs initial {e0:.6g}')
        done = grad.norm <= cfg.grad_tol
        if done or it % cfg.trace_every == 0 or it == cfg.max_iters:
            record(it, path, grad)
        if done:
            return report('converged', path, it, delta)
    return report('max_iters', path, cfg.max_iters, delta)
