# ricci_mcmc/__init__.py

"""
Optimal-curvature continuous-time generators for finite-state MCMC.

Modules:
- simplex      distributions on the open simplex, seeded random streams
- divergence   phi-divergences (alpha family, KL, reverse KL, chi-squared)
- generator    optimal and Metropolis-Hastings Q-matrices
- dynamics     forward-Euler and closed-form master-equation solvers
- xi, curvature Gamma calculus, curvature bounds and rate formulas
- experiments  averaged L1 convergence benchmark with CSV/SVG output
"""

from .divergence import chi_squared, divergence, kl, make_phi_alpha, reverse_kl
from .errors import RicciMCMCError
from .generator import build_mh_q, build_optimal_q, optimal_c
from .simplex import Distribution, RandomSource, sample_uniform_simplex, validate_distribution

__version__ = "0.1.0"

__all__ = [
    "Distribution",
    "RandomSource",
    "RicciMCMCError",
    "build_mh_q",
    "build_optimal_q",
    "chi_squared",
    "divergence",
    "kl",
    "make_phi_alpha",
    "optimal_c",
    "reverse_kl",
    "sample_uniform_simplex",
    "validate_distribution",
]
