"""Slice-wise gradient norms along bump paths of increasing eccentricity."""

import numpy as np

from elastica.curves import build_bump_path, generate_shape
from elastica.gradient import assemble_gradient
from elastica.metric import ElasticParams


def main():
    c = generate_shape('circle', 100)
    for ecc in (0.5, 0.8, 0.8844):
        path = build_bump_path(c, generate_shape(('ellipse', ecc), 100), 20)
        for a in (1.0, 100.0, 0.01):
            g = assemble_gradient(path, ElasticParams(a, 1.0))
            s = g.slice_norms
            print(f'ecc {ecc:<6g} a={a:<5g} |grad|(1/2) / |grad|(1/4) = {s[10] / s[5]:6.2f}   '
                  + ' '.join(f'{x:.2f}' for x in s))


if __name__ == '__main__':
    np.set_printoptions(precision=3)
    main()
