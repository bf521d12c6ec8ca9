"""Harmonic analysis on the integer lattice: discrete Riesz potentials,
fractional maximal operators, Hardy-space atoms, and a verification harness
that sweeps the associated norm inequalities at desk scale.
"""

from .lattice import (
    DiscreteCube,
    Exponents,
    LatticeSignal,
    P_INF,
    elementary_inequalities,
    grid_points,
    lp_norm,
    partial_sum,
    power_law_term,
    series_tail_bound,
)
from .operators import (
    TGrid,
    hp_norm_estimate,
    j_gamma,
    kernel_lp_bound,
    maximal,
    maximal_field,
    poisson_maximal,
    riesz_direct,
    riesz_fft,
    separable_majorant,
)
from .atoms import (
    Atom,
    TaylorExpansion,
    atom_tail_lq_bound,
    dp_degree,
    expansion_order,
    generate_atom,
    moment,
    remainder_bound,
    taylor_polynomial,
    validate_atom,
)
from .verify import ExperimentRow, SweepConfig, run_suites

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "DiscreteCube",
    "ExperimentRow",
    "Exponents",
    "LatticeSignal",
    "P_INF",
    "SweepConfig",
    "TGrid",
    "TaylorExpansion",
    "atom_tail_lq_bound",
    "dp_degree",
    "elementary_inequalities",
    "expansion_order",
    "generate_atom",
    "grid_points",
    "hp_norm_estimate",
    "j_gamma",
    "kernel_lp_bound",
    "lp_norm",
    "maximal",
    "maximal_field",
    "moment",
    "partial_sum",
    "poisson_maximal",
    "power_law_term",
    "remainder_bound",
    "riesz_direct",
    "riesz_fft",
    "run_suites",
    "separable_majorant",
    "series_tail_bound",
    "taylor_polynomial",
    "validate_atom",
    "__version__",
]
