"""selectlab: key-exchange analysis of Hoare's Quickselect.

Instrumented algorithm, exact finite-n distributions, the limit
perpetuity's moments/CDF/density, convergence-rate constants, and a
perfect sampler for the limit law via coupling from the past.
"""

from .quickselect import (PartitionOutcome, RunRecord, hoare_partition,
                          quickselect, run_random)
from .exact import (RationalPmf, ExactExpectationTable, JointEnumeration,
                    split_pmf, swaps_conditional_pmf,
                    expected_swaps_first_pass, expected_total_swaps,
                    expected_moves_mahmoud, enumerate_small)
from .limit import (MomentTable, CdfGrid, DensityGrid, RateConstants,
                    moments, kernel_cdf, kernel_density, cdf_solve,
                    density_solve, right_derivative_at_zero, tail_bound,
                    rate_constants, ks_rate_bound)
from .sampler import (ALPHA, COALESCENCE_PROB, LimitSample, cdf_G,
                      quantile_G_inv, cftp_sample, sample,
                      kernel_update_check)
from .experiments import (ks_distance_empirical, ks_two_sample,
                          convergence_study, variance_scaling,
                          moves_vs_exchanges_report)
from .rng import DEFAULT_SEED, make_rng

__version__ = "0.1.0"
