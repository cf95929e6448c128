"""Energy landscape over the (u, v) shape family for two a/b ratios.

Besides the 5x5 grids, the bump energies of a few ellipse/square pairs
matched by other distance notions are printed, to show how much the
stretch-to-bend ratio depends on how the family is calibrated.
"""

import argparse
from pathlib import Path

import numpy as np

from elastica.curves import build_bump_path, generate_shape
from elastica.gradient import path_energy
from elastica.io import save_landscape
from elastica.landscape import LandscapeConfig, energy_landscape
from elastica.metric import ElasticParams

# (label, ellipse eccentricity, superellipse exponent)
PAIRS = [('family corners', 0.8, 6.0),
         ('equal RMS vertex displacement', 0.705, 30.0),
         ('equal L2 angle distance', 0.8, 4.78)]


def bump_energy(shape, params, n, n_t):
    c = generate_shape('circle', n)
    return path_energy(build_bump_path(c, generate_shape(shape, n), n_t), params)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--grid', type=int, default=5)
    ap.add_argument('--n', type=int, default=100)
    ap.add_argument('--nt', type=int, default=20)
    ap.add_argument('--out', type=Path, default=Path('results/landscape'))
    args = ap.parse_args()
    for a in (100.0, 0.01):
        params = ElasticParams(a, 1.0)
        land = energy_landscape(LandscapeConfig(params, args.grid, args.n, args.nt))
        save_landscape(args.out / f'landscape_a{a:g}.csv', land.us, land.vs, land.energy)
        print(f'a={a:g}: ratio {land.anisotropy:.3f}')
        with np.printoptions(precision=4, suppress=True):
            print(land.energy)
        for label, e, p in PAIRS:
            ratio = (bump_energy(('ellipse', e), params, args.n, args.nt)
                     / bump_energy(('superellipse', p), params, args.n, args.nt))
            print(f'  {label:32s} ellipse {e} vs p={p}: ratio {ratio:.3f}', flush=True)


if __name__ == '__main__':
    main()
