"""
Energy landscape over the two-parameter family of bump paths.
"""

from dataclasses import dataclass, field

import numpy as np

from .curves import build_bump_path, generate_shape, sin2_profile
from .gradient import path_energy
from .metric import ElasticParams

__all__ = ['LandscapeConfig', 'Landscape', 'energy_landscape']


@dataclass(frozen=True)
class LandscapeConfig:
    params: ElasticParams = field(default_factory=ElasticParams)
    grid: int = 5
    n: int = 100
    n_t: int = 20
    extent: float = 1.0

    def __post_init__(self):
        if self.grid < 3:
            raise ValueError(f'landscape grid must be at least 3x3, got {self.grid}')
        if not 0 < self.extent <= 1:
            raise ValueError(f'extent must lie in (0, 1], got {self.extent}')


@dataclass
class Landscape:
    us: np.ndarray
    vs: np.ndarray
    energy: np.ndarray       # energy[i, j] at (us[i], vs[j])

    def _axis(self, values):
        return int(np.argmin(np.abs(values)))

    @property
    def stretch_max(self):
        """Largest energy along the pure-ellipse line v = 0."""
        return float(self.energy[:, self._axis(self.vs)].max())

    @property
    def bend_max(self):
        """Largest energy along the pure-squaring line u = 0."""
        return float(self.energy[self._axis(self.us), :].max())

    @property
    def anisotropy(self):
        return self.stretch_max / self.bend_max


def energy_landscape(config=None, progress=None):
    """E(u, v) of circle -> family(u, v) -> circle bump paths on a square grid."""
    cfg = config or LandscapeConfig()
    axis = np.linspace(-cfg.extent, cfg.extent, cfg.grid)
    base = generate_shape('circle', cfg.n)
    grid = np.zeros((cfg.grid, cfg.grid))
    for i, u in enumerate(axis):
        for j, v in enumerate(axis):
            try:
                peak = generate_shape(('family', float(u), float(v)), cfg.n)
                path = build_bump_path(base, peak, cfg.n_t, sin2_profile)
                grid[i, j] = path_energy(path, cfg.params)
            except ValueError as exc:
                raise type(exc)(f'landscape cell (u={u:g}, v={v:g}): {exc}') from None
            if progress is not None:
                progress(i, j, grid[i, j])
    return Landscape(axis, axis.copy(), grid)
