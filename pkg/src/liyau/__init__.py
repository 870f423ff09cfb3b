"""Numerical laboratory for Li-Yau type gradient estimates of the heat equation.

Modules
-------
paramfun
    Parameter curves beta(t) and weight functions a(t) with admissibility checks.
bounds
    The estimate catalog, psi1 / psi2 and comparison tools.
varopt
    Upper approximations of the variational bounds phi1 / phi2.
kernels
    Closed-form heat kernels on model spaces and grid verification.
simulate
    Radial Crank-Nicolson heat solver with an estimate monitor.
cli
    The ``liyau`` command-line tool.
"""

from .bounds import (ESTIMATE_IDS, Estimate, dominates, envelope, eval_classical,
                     eval_qian_general, get_estimate, max_h, psi1, psi2, sigma_lambda)
from .errors import ConfigurationError, DomainError, LiYauError, NumericalError, PreconditionError
from .kernels import ModelManifold, kernel_logderivs, sharpness_ratio, verify_on_grid
from .paramfun import ParamFunction, WeightFunction, beta_eval, validate_beta, validate_weight
from .simulate import InitialCondition, RadialGrid, monitor, run_radial_heat
from .varopt import corollary_bound, phi_upper

__version__ = "0.1.0"

__all__ = [
    "ESTIMATE_IDS", "Estimate", "dominates", "envelope", "eval_classical", "eval_qian_general",
    "get_estimate", "max_h", "psi1", "psi2", "sigma_lambda",
    "ConfigurationError", "DomainError", "LiYauError", "NumericalError", "PreconditionError",
    "ModelManifold", "kernel_logderivs", "sharpness_ratio", "verify_on_grid",
    "ParamFunction", "WeightFunction", "beta_eval", "validate_beta", "validate_weight",
    "InitialCondition", "RadialGrid", "monitor", "run_radial_heat",
    "corollary_bound", "phi_upper", "__version__",
]
