"""Simulation and verification toolkit for the one-dimensional Wigner jellium:
exact and Markov-chain samplers for the finite Coulomb gas, exact samplers
for its limiting edge point processes, and a distribution-free statistical
harness."""

from .background import (BackgroundSpec, FixedDensity, GammaFamily, Potential1D,
                         UniformInterval, electric_field, minus_potential,
                         per_particle_potential, self_energy)
from .edge_limits import (HalfWell, LimitFamily, Regime, SquaredGamma, SquaredZero,
                          TopKSample, dominating_halfwell, finite_to_limit_distance,
                          gumbel_limit_cdf, gumbel_mean, gumbel_statistic,
                          sample_halfwell_topk, sample_limit_topk)
from .exceptions import (ConfigInvalid, DepthTooSmall, InadmissibleGas,
                         JelliumError, MaxAttemptsExceeded,
                         NonIntegrableBackground, NonNormalizableDensity,
                         UnsortedInput, WindowTooDeep)
from .finite_gas import (Configuration, GasParams, count_right_of_zero,
                         energy_ordered, energy_pairwise, estimate_log_partition,
                         sample_gas_gaussian_conditional, sample_gas_gibbs,
                         sample_gas_gibbs_ensemble, sample_gas_rejection,
                         sample_independent)
from .order_stats import (ConditionalSpec, DirectReport, conditional_moments,
                          gap_means, sample_conditional_direct, sample_renyi_topk,
                          yform_means)
from .stats import (DominanceVerdict, EmpiricalDistribution, TailFit, dkw_band,
                    dominance_check, gelman_rubin, ks_distance_to_cdf,
                    ks_statistic, tail_exponent_fit, two_sample_band)
from .streams import substream

__version__ = "0.1.0"
