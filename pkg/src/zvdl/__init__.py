"""zvdl: numerical lab for the zeta variants V_z(s) = zeta(s) exp(z s).

Submodules:

- ``zeta``       Riemann zeta, its derivative, log-gamma, vectorised zeta
- ``variants``   V_z, generic V^g_z, fixed-point residuals
- ``fixpoints``  Newton solves, Riemann zeros, traces along rays
- ``spirals``    unwrapped angles, log-linear fits, decay tests, coarsening
- ``harness``    verdict reports for the theorem, corollary and conjectures
- ``render``     quadrant plots, basins, spiral overlays, PPM output
- ``cli``        the ``zvdl`` command
"""

__version__ = "0.1.0"

from .zeta import zeta, zeta_and_deriv, zeta_array, log_gamma, EvalParams, ZetaError, PoleError
from .variants import RaySpec, GenericFunction, v, fix_residual
from .fixpoints import (
    NewtonConfig,
    Progression,
    FixedPointSequence,
    newton_fixpoint,
    riemann_zero,
    riemann_zeros,
    nearest_fixpoint_to_zero,
    trace_ray,
)

__all__ = [
    "zeta",
    "zeta_and_deriv",
    "zeta_array",
    "log_gamma",
    "EvalParams",
    "ZetaError",
    "PoleError",
    "RaySpec",
    "GenericFunction",
    "v",
    "fix_residual",
    "NewtonConfig",
    "Progression",
    "FixedPointSequence",
    "newton_fixpoint",
    "riemann_zero",
    "riemann_zeros",
    "nearest_fixpoint_to_zero",
    "trace_ray",
]
