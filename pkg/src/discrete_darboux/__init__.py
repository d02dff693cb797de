"""Darboux transformations of Jacobi operators on the semi-infinite lattice.

Construct first-order difference intertwiners from nodeless seed solutions,
obtain the partner tridiagonal operator with all its solutions (including
the two missing states at the factorization energy), assemble the nilpotent
block supercharges, and run the oscillator-basis free-particle model that
produces a non-local exactly solvable interaction.  Every defining identity
is checkable as a numerical residual.
"""

from .darboux import (
    DarbouxOperator,
    MissingStatePair,
    VerifyReport,
    apply_transform,
    build_transform,
    gauge_signs,
    missing_states,
    norm_ratio,
    verify_transform,
)
from .estimator import DarbouxTransform
from .models import (
    NonlocalPotential,
    SlopeFit,
    Step2Operator,
    asymptotic_exponent,
    basis_function_grid,
    free_particle_coeffs,
    hermite_seed,
    laplacian_model,
    merge_parity,
    merge_parity_seqs,
    nonlocal_potential,
    oscillator_model,
    restrict_parity,
    split_even_odd,
    step2_residual,
)
from .operators import (
    JacobiOperator,
    Seq,
    WronskianReport,
    apply_jacobi,
    l2_inner,
    recurrence_residual,
    second_solution,
    solve_recurrence,
    wronskians,
)
from .susy import SuperReport, SuperSystem, SuperVec, apply_supercharge, superalgebra_check

__version__ = "0.1.0"

__all__ = [
    "DarbouxOperator",
    "DarbouxTransform",
    "JacobiOperator",
    "MissingStatePair",
    "NonlocalPotential",
    "Seq",
    "SlopeFit",
    "Step2Operator",
    "SuperReport",
    "SuperSystem",
    "SuperVec",
    "VerifyReport",
    "WronskianReport",
    "apply_jacobi",
    "apply_supercharge",
    "apply_transform",
    "asymptotic_exponent",
    "basis_function_grid",
    "build_transform",
    "free_particle_coeffs",
    "gauge_signs",
    "hermite_seed",
    "l2_inner",
    "laplacian_model",
    "merge_parity",
    "merge_parity_seqs",
    "missing_states",
    "nonlocal_potential",
    "norm_ratio",
    "oscillator_model",
    "recurrence_residual",
    "restrict_parity",
    "second_solution",
    "solve_recurrence",
    "split_even_odd",
    "step2_residual",
    "superalgebra_check",
    "verify_transform",
    "wronskians",
]
