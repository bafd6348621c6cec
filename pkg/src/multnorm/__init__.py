"""Numerics for n-point multiplier norms on reproducing kernel Hilbert spaces.

Kernels on the unit disc and unit ball, Pick-matrix pencil norms,
Nevanlinna-Pick and Sarason interpolation, weighted-shift dominations,
embedding identities, and a reproducible experiment CLI.
"""

from .kernels import (
    KernelSpec,
    kernel_eval,
    monomial_norm_sq,
    monomial_norm_sq_exact,
    gram,
    delta_metric,
    pseudohyperbolic,
    reciprocal_coeffs,
    domination_radius,
)
from .picknorm import (
    PickData,
    SearchConfig,
    n_point_norm_at,
    n_point_norm_bisect,
    two_point_check,
    trunc_mult_norm,
    search_n_point_norm,
    column_norm_lower_bound,
)
from .interpolation import (
    BlaschkeProduct,
    ModelSpaceProblem,
    pick_solve,
    sarason_solve,
    eval_on_matrix,
)
from .shifts import (
    ShiftSpec,
    GradedSpacePair,
    shift_weights,
    shift_matrix,
    poly_calc_norm,
    kacnelson_check,
    weight_inequality_scan,
)
from .embeddings import (
    tau_eval,
    tau_pullback,
    proj_extend,
    boundary_decomposition,
    sarason_function,
    SarasonInput,
    coefficient_asymptotics_report,
    blaschke_power_norms,
)
from .experiments import ExperimentConfig, run_experiment
from .poly import Poly

__version__ = "0.1.0"
