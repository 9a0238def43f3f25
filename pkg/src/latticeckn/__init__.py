"""Discrete Caffarelli-Kohn-Nirenberg inequalities on the integer lattice.

Schwarz rearrangement on Z^N, weighted lattice norms, rearrangement-
projected minimization of the optimal constants S and K, ground states of
the associated p-Laplace equations, the multilinear continuum extension and
the logarithmic cutoff estimate.
"""

__version__ = "0.1.0"

from .ckn import CknParams, KParams, SParams, ckn_quotient, quotient, validate
from .elliptic import GroundState, el_residual, ground_state_K, ground_state_S
from .equivalence import CutoffSpec, cutoff_gradient_norm, decay_exponent_fit, make_cutoff
from .extend import barycentric_coeffs, equivalence_ratios, evaluate_extension
from .funcspace import LatticeFunction, d1p_norm, distribution, lp_norm, p_laplacian
from .lattice import Box, Direction, directions
from .rearrange import is_schwarz_symmetric, one_step, rearrange_1d, schwarz
from .varmin import SolverConfig, minimize_K, minimize_S

__all__ = [
    "Box",
    "CknParams",
    "CutoffSpec",
    "Direction",
    "GroundState",
    "KParams",
    "LatticeFunction",
    "SParams",
    "SolverConfig",
    "barycentric_coeffs",
    "ckn_quotient",
    "cutoff_gradient_norm",
    "d1p_norm",
    "decay_exponent_fit",
    "directions",
    "distribution",
    "el_residual",
    "equivalence_ratios",
    "evaluate_extension",
    "ground_state_K",
    "ground_state_S",
    "is_schwarz_symmetric",
    "lp_norm",
    "make_cutoff",
    "minimize_K",
    "minimize_S",
    "one_step",
    "p_laplacian",
    "quotient",
    "rearrange_1d",
    "schwarz",
    "validate",
]
