"""Critical Ising model on sparse random graphs: simulation and verification."""

from .census import (
    CycleCensus,
    SscParams,
    count_cycles_upto,
    count_paths,
    normalize_path_count,
    path_gamma1,
    path_gamma2,
    ssc_functional,
    theta,
)
from .exact import (
    MagnetizationLaw,
    MagnetizationTable,
    critical_beta,
    delta_n,
    exact_partition_by_magnetization,
    magnetization_law,
    spin_histogram,
)
from .glauber import (
    ChainConfig,
    estimate_log_partition,
    estimate_magnetization_moments,
    heat_bath_flip_probability,
    run_glauber,
    spectral_gap_upper_bound,
)
from .graphs import ER, REGULAR, ModelSpec, MultiGraph, census_basic, gen_config_model, gen_er
from .laws import FreeEnergyLimit, Mixture, MixtureComponent, RegLimit, distance_stats
from .planted import (
    WeightedSample,
    null_cycle_mean,
    planted_cycle_mean,
    planted_cycle_probability,
    planted_path_mean,
    planted_reweight,
)
from .variational import (
    EdgeEmpirical,
    SpinSystem,
    asymptotic_moments,
    exact_first_moment,
    ising_system,
    log_count_spin_matchings,
    numeric_hessian_det,
    phi,
    phi_tilde,
    solve_h_star,
    two_copy_system,
)

__version__ = "0.1.0"
