"""Travelling-graph solutions of forced mean curvature motion.

Sub-solutions from measures on the sphere, infima of planes, the radial cone
profile, edge and arc super-solutions, Laplace asymptotics of sector
integrals, and a Newton solver for the elliptic equation on a 2-D grid.
"""
from .cone import ConeProfile, cone_constant, eval_phi_c, solve_cone, theta_bar, v0_bracket
from .eikonal import (PlaneSpec, ProfileN3, build_measure_N3, cover_compact, edge_distance,
                      eval_inf_planes, eval_psi)
from .errors import *  # noqa: F401,F403
from .laplace import SectorIntegral, f_asymptotic, f_direct, g_inverse, g_map, n_zero
from .params import Params, PolarPoint, from_polar, make_params, to_polar
from .solver import GridField, NewtonOptions, concavity_probe, residual_field, solve_dirichlet, verify_sandwich
from .subsolution import (MomentBundle, SphereMeasure, SubSolution, eval_phi_star, grad_phi_star,
                          hess_phi_star, mcm_operator, moments, viscous_eikonal_residual)
from .supersolution import (ArcPiece, GlobalSuperN3, assemble_global_N3, eval_arc, eval_edge,
                            eval_planes_inf, sandwich_report)

__version__ = "0.1.0"
