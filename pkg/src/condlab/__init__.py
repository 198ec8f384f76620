"""Condensation in lattice gases with size-dependent product weights.

Exact partition tables, exact and zero-range samplers, size-biased cluster
statistics, asymptotic formulas and brute-force enumeration checks.
"""

from .errors import BudgetError, DomainError, ModelError, RegimeError, TableMismatchError
from .weights import (
    BulkWeights,
    GrandCanonical,
    ModelSpec,
    PerturbationParams,
    grand_canonical,
    invert_density,
    power_series_moments,
    tilt_fugacity,
    truncated_rho_c,
)
from .partition import (
    LogPartitionTable,
    build_bulk_table,
    build_table,
    decomposition_partial,
    log_z_asymptotic,
    rate_function,
    saddle_point,
    size_biased_marginal,
    site_marginal,
    z_ratio_asymptotic,
    z_ratio_exact,
)
from .observables import (
    PhaseReport,
    Regime,
    TailCurve,
    classify_phase,
    cluster_scale,
    curve_distance,
    default_s_grid,
    empirical_tail,
    macroscopic_tail,
    theoretical_tail,
)
from .sampler import direct_sample, direct_samples, make_zrp_rates, simulate_zrp, size_biased_permutation
from .streams import stream

__version__ = "0.1.0"
