"""Discrete velocity-space machinery: Maxwellians, projections, collisions."""
from __future__ import annotations

from .collision import (CollisionQuadrature, collision_pair, collision_Q, conservation_defect,
                        nu_freq, sphere_quadrature)
from .grids import R_GAS, MaxwellParams, VelocityGrid, box_grid, hermite_grid
from .linearized import (LINEAR_QUAD, GlobalMaxwellianStar, InverseResult, LinearizedOperators,
                         assemble_linearized, gbar, invert_LM_on_microspace,
                         linearized_LM, linearized_NM, solve_LM_on_microspace)
from .suite import (CheckResult, check_conservation, check_dissipativity, check_inverse,
                    check_orthonormality, random_smooth_distribution, run_suite)
from .maxwell import (Distribution, Moments, chi_basis, collision_invariants,
                      fit_maxwellian, inner_product, maxwellian, micro_macro_split,
                      moments, project_P0, project_P1, project_Pc)

__all__ = [
    "CheckResult", "check_conservation", "check_dissipativity", "check_inverse",
    "check_orthonormality", "random_smooth_distribution", "run_suite",
    "LINEAR_QUAD", "R_GAS", "CollisionQuadrature", "Distribution", "GlobalMaxwellianStar",
    "InverseResult", "LinearizedOperators", "MaxwellParams", "Moments", "VelocityGrid",
    "assemble_linearized", "box_grid", "chi_basis", "collision_pair", "collision_Q", "collision_invariants",
    "conservation_defect", "fit_maxwellian", "gbar", "hermite_grid", "inner_product",
    "invert_LM_on_microspace", "linearized_LM", "linearized_NM", "maxwellian",
    "micro_macro_split", "moments", "nu_freq", "project_P0", "project_P1", "project_Pc",
    "solve_LM_on_microspace", "sphere_quadrature",
]


def _apply_thread_setting() -> None:
    import warnings

    from ..errors import ValidationError
    from ..threads import configure_threads
    try:
        configure_threads()
    except ValidationError as exc:
        warnings.warn(f"{exc}; keeping the default thread count", stacklevel=2)


_apply_thread_setting()
