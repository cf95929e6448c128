"""Finite-difference error of both xi schemes over random paths, a/b ratios and time grids."""

import argparse

import numpy as np

from elastica.checks import check_full_gradient, check_xi, random_path
from elastica.metric import ElasticParams


def sweep(n_t, ratio, seeds, n, scheme, order):
    params = ElasticParams(ratio, 1.0)
    xi, pair = [], []
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        path = random_path(rng, n, n_t)
        state = rng.bit_generator.state
        xi.append(check_xi(path, params, rng, order=order, scheme=scheme)[0])
        rng.bit_generator.state = state
        pair.append(check_full_gradient(path, params, rng, order=order, scheme=scheme)[0])
    return np.array(xi), np.array(pair)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--seeds', type=int, default=20)
    ap.add_argument('--n', type=int, default=60)
    ap.add_argument('--nt', type=int, nargs='+', default=[16, 32, 64])
    ap.add_argument('--order', type=int, default=4)
    args = ap.parse_args()
    print(f'{"scheme":>10s} {"N_t":>4s} {"a/b":>6s}  {"xi med":>8s} {"xi max":>8s}  {"pair med":>8s} {"pair max":>8s}')
    for scheme in ('continuous', 'discrete'):
        for n_t in args.nt:
            for ratio in (0.01, 1.0, 100.0):
                xi, pair = sweep(n_t, ratio, args.seeds, args.n, scheme, args.order)
                print(f'{scheme:>10s} {n_t:4d} {ratio:6g}  {np.median(xi):8.1e} {xi.max():8.1e}  '
                      f'{np.median(pair):8.1e} {pair.max():8.1e}', flush=True)


if __name__ == '__main__':
    main()
