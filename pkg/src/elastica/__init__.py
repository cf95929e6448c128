"""
Geodesics between closed planar curves under the quotient elastic metrics,
computed on chains of equal rods by path straightening.
"""

from .curves import (AnglePath, Chain, LiftError, PathOfChains, ShapeError, angle_path,
                     angles_from_chain, build_bump_path, build_linear_path, chain_from_angles,
                     eccentricity, generate_shape, resample_arclength)
from .gradient import GradientField, assemble_gradient, compute_xi, path_energy, xi_to_beta
from .metric import (ElasticParams, elastic_inner, horizontal_m, project_horizontal,
                     quotient_inner)
from .straighten import StraightenConfig, StraightenReport, auto_step, straighten
from .tridiag import CyclicTridiagonal, NearSingularError, solve_cyclic, solve_dense

__all__ = [
    'AnglePath', 'Chain', 'LiftError', 'PathOfChains', 'ShapeError', 'angle_path', 'angles_from_chain',
    'build_bump_path', 'build_linear_path', 'chain_from_angles', 'eccentricity', 'generate_shape',
    'resample_arclength', 'GradientField', 'assemble_gradient', 'compute_xi', 'path_energy',
    'xi_to_beta', 'ElasticParams', 'elastic_inner', 'horizontal_m', 'project_horizontal',
    'quotient_inner', 'StraightenConfig', 'StraightenReport', 'auto_step', 'straighten',
    'CyclicTridiagonal', 'NearSingularError', 'solve_cyclic', 'solve_dense',
]

__version__ = '0.1.0'
