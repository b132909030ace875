import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats as sps

from jellium1d.background import BackgroundSpec, GammaFamily, UniformInterval
from jellium1d.exceptions import (InadmissibleGas, MaxAttemptsExceeded,
                                  UnsortedInput)
from jellium1d.finite_gas import (Configuration, GasParams, count_right_of_zero,
                                  energy_ordered, energy_pairwise,
                                  estimate_log_partition,
                                  gaussian_conditional_means,
                                  gaussian_conditional_variance,
                                  sample_gas_gaussian_conditional,
                                  sample_gas_gibbs, sample_gas_gibbs_ensemble,
                                  sample_gas_rejection, sample_independent)
from jellium1d.stats import (EmpiricalDistribution, gelman_rubin, ks_statistic,
                             two_sample_band)
from jellium1d.streams import substream

BG = BackgroundSpec(UniformInterval(-1.0, 0.0), 2.0)
P2 = GasParams(2, 1.0, 2.0)


def uniform_bg(alpha, a=-1.0, b=0.0):
    return BackgroundSpec(UniformInterval(a, b), alpha)


class TestEnergies:
    def test_two_particle_example(self):
        assert energy_pairwise([0.5, -0.5], BG, P2) == pytest.approx(0.75)
        assert energy_ordered([0.5, -0.5], BG, P2) == pytest.approx(0.75)

    def test_single_particle_has_no_pair_term(self):
        p1 = GasParams(1, 1.0, 1.2)
        bg = uniform_bg(1.2)
        from jellium1d.background import minus_potential
        assert energy_pairwise([0.0], bg, p1) == pytest.approx(minus_potential(bg, 0.0))

    def test_coincident_points(self):
        p3 = GasParams(3, 1.0, 3.5)
        bg = uniform_bg(3.5)
        from jellium1d.background import minus_potential
        t = -0.3
        assert energy_pairwise([t, t, t], bg, p3) == pytest.approx(
            3 * minus_potential(bg, t))

    def test_two_point_combinatorial_identity(self):
        # -sum |x_i - x_j| = sum (2k-n-1) x_(k) at n=2
        x = np.array([1.0, 0.0])
        assert -np.abs(x[0] - x[1]) == pytest.approx((-1) * x[0] + (1) * x[1])

    def test_random_vector_matches_pairwise(self, rng):
        p6 = GasParams(6, 1.0, 6.5)
        bg = uniform_bg(6.5)
        x = rng.normal(size=6) * 2.0
        expected = energy_pairwise(x, bg, p6)
        assert energy_ordered(np.sort(x)[::-1], bg, p6) == pytest.approx(
            expected, rel=1e-9)

    def test_all_equal_vector_exact(self):
        p4 = GasParams(4, 1.0, 4.5)
        bg = uniform_bg(4.5)
        x = np.full(4, -0.25)
        assert energy_ordered(x, bg, p4) == energy_pairwise(x, bg, p4)

    def test_unsorted_rejected(self):
        with pytest.raises(UnsortedInput):
            energy_ordered([0.0, 1.0], BG, P2)

    def test_inadmissible_rejected(self):
        with pytest.raises(InadmissibleGas):
            energy_pairwise([0.0, 0.1, 0.2], uniform_bg(2.0), GasParams(3, 1.0, 2.0))

    @given(st.lists(st.floats(-40.0, 40.0), min_size=2, max_size=12))
    @settings(max_examples=150, deadline=None)
    def test_combinatorial_identity_property(self, xs):
        n = len(xs)
        params = GasParams(n, 1.0, n + 0.7)
        bg = uniform_bg(n + 0.7)
        x = np.array(xs)
        e_pair = energy_pairwise(x, bg, params)
        e_ord = energy_ordered(np.sort(x)[::-1], bg, params)
        assert e_ord == pytest.approx(e_pair, rel=1e-9, abs=1e-9)

    @given(st.lists(st.floats(-40.0, 40.0), min_size=2, max_size=8), st.randoms())
    @settings(max_examples=80, deadline=None)
    def test_exchangeability_property(self, xs, pyrandom):
        n = len(xs)
        params = GasParams(n, 1.0, n + 0.7)
        bg = uniform_bg(n + 0.7)
        shuffled = list(xs)
        pyrandom.shuffle(shuffled)
        assert energy_pairwise(np.array(shuffled), bg, params) == energy_pairwise(
            np.array(xs), bg, params)


class TestConfiguration:
    def test_from_positions_sorts_and_caches_energy(self):
        c = Configuration.from_positions([0.0, -1.0, -0.5], uniform_bg(3.5),
                                         GasParams(3, 1.0, 3.5))
        assert list(c.positions) == [0.0, -0.5, -1.0]
        assert c.energy == pytest.approx(
            energy_pairwise(c.positions, uniform_bg(3.5), GasParams(3, 1.0, 3.5)))

    def test_count_right_of_zero(self):
        assert count_right_of_zero(np.array([1.0, 0.5, -1.0])) == 2
        assert count_right_of_zero(np.array([-1.0, -2.0])) == 0
        assert count_right_of_zero(np.array([0.0, -1.0])) == 0


class TestSampleIndependent:
    def test_mean_matches_quadrature(self, rng):
        p1 = GasParams(1, 1.0, 1.0)
        bg = uniform_bg(1.0)
        x = sample_independent(bg, p1, 1, rng, size=400_000)
        pot = bg.phi_pieces()
        z, _ = integrate.quad(lambda t: math.exp(-pot(t)), -50, 50)
        m, _ = integrate.quad(lambda t: t * math.exp(-pot(t)), -50, 50)
        se = x.std() / math.sqrt(x.size)
        assert x.mean() == pytest.approx(m / z, abs=3 * se)

    def test_symmetric_background_centered_coordinate(self, rng):
        # background symmetric about c and middle index: mean is c
        c = -0.5
        bg = BackgroundSpec(UniformInterval(-1.0, 0.0), 3.2)
        params = GasParams(3, 2.0, 3.2)
        x = sample_independent(bg, params, 2, rng, size=200_000)
        se = x.std() / math.sqrt(x.size)
        assert x.mean() == pytest.approx(c, abs=3 * se)

    def test_conditionally_gaussian_inside_interval(self, rng):
        # draws landing inside [a, b] follow the truncated normal with the
        # representation's mean and variance
        a, b = -1.0, 0.0
        params = GasParams(3, 4.0, 3.5)
        bg = uniform_bg(3.5)
        means = gaussian_conditional_means(a, b, params)
        sd = math.sqrt(gaussian_conditional_variance(a, b, params))
        for i in (1, 3):
            x = sample_independent(bg, params, i, rng, size=300_000)
            inside = x[(x >= a) & (x <= b)]
            mu = means[i - 1]
            tn = sps.truncnorm((a - mu) / sd, (b - mu) / sd, loc=mu, scale=sd)
            m = inside.size
            assert inside.mean() == pytest.approx(
                tn.mean(), abs=4 * math.sqrt(tn.var() / m))
            var_se = tn.var() * math.sqrt(2.0 / (m - 1))
            assert inside.var() == pytest.approx(tn.var(), abs=4 * var_se)


class TestRejectionSampler:
    def test_single_particle_accepts_everything(self, rng):
        _, rate = sample_gas_rejection(uniform_bg(1.0), GasParams(1, 1.0, 1.0),
                                       rng, size=500)
        assert rate == 1.0

    def test_reports_rate_and_matches_gibbs(self, rng):
        samples, rate = sample_gas_rejection(BG, GasParams(2, 8.0, 2.0), rng,
                                             size=30_000)
        assert 0.0 < rate < 1.0
        ens = sample_gas_gibbs_ensemble(BG, GasParams(2, 8.0, 2.0), rng,
                                        size=30_000, sweeps=48)
        for j in range(2):
            d = ks_statistic(EmpiricalDistribution.from_samples(samples[:, j]),
                             EmpiricalDistribution.from_samples(ens[:, j]))
            assert d < two_sample_band(30_000, 30_000, 0.99)

    def test_low_temperature_acceptance_is_high(self, rng):
        # beta = 50 separates the means well; record as a regression floor
        bg = uniform_bg(5.5)
        _, rate = sample_gas_rejection(bg, GasParams(5, 50.0, 5.5), rng, size=2000)
        assert rate >= 0.5

    def test_budget_exhaustion(self, rng):
        with pytest.raises(MaxAttemptsExceeded):
            sample_gas_rejection(uniform_bg(7.5), GasParams(8, 0.5, 7.5), rng,
                                 size=10_000, max_attempts=2_000)

    def test_gamma_family_background(self, rng):
        bg = BackgroundSpec(GammaFamily(3, 1.5), 6.0)
        params = GasParams(3, 1.0, 6.0)
        samples, rate = sample_gas_rejection(bg, params, rng, size=20_000)
        ens = sample_gas_gibbs_ensemble(bg, params, rng, size=20_000, sweeps=48)
        for j in range(3):
            d = ks_statistic(EmpiricalDistribution.from_samples(samples[:, j]),
                             EmpiricalDistribution.from_samples(ens[:, j]))
            assert d < two_sample_band(20_000, 20_000, 0.99)

    def test_gamma_family_needs_matching_n(self, rng):
        bg = BackgroundSpec(GammaFamily(3, 1.5), 6.0)
        with pytest.raises(ValueError):
            sample_gas_rejection(bg, GasParams(4, 1.0, 6.0), rng, size=10)


class TestGibbsSampler:
    def test_single_particle_reduces_to_independent(self, rng):
        p1 = GasParams(1, 1.0, 1.0)
        bg = uniform_bg(1.0)
        chain = list(sample_gas_gibbs(bg, p1, rng, sweeps=20_100, burn_in=100))
        xs = np.array([c.positions[0] for c in chain])
        ref = sample_independent(bg, p1, 1, rng, size=xs.size)
        d = ks_statistic(EmpiricalDistribution.from_samples(xs),
                         EmpiricalDistribution.from_samples(ref))
        assert d < two_sample_band(xs.size, ref.size, 0.99)

    def test_marginals_match_rejection(self, rng):
        params = GasParams(3, 2.0, 3.5)
        bg = uniform_bg(3.5)
        rej, _ = sample_gas_rejection(bg, params, rng, size=20_000)
        ens = sample_gas_gibbs_ensemble(bg, params, rng, size=20_000, sweeps=48)
        for j in range(3):
            d = ks_statistic(EmpiricalDistribution.from_samples(rej[:, j]),
                             EmpiricalDistribution.from_samples(ens[:, j]))
            assert d < two_sample_band(20_000, 20_000, 0.99)

    def test_gelman_rubin_from_dispersed_starts(self, rng):
        params = GasParams(3, 2.0, 3.5)
        bg = uniform_bg(3.5)
        chains = []
        for init in ([3.0, 2.0, 1.0], [-2.0, -2.5, -3.0]):
            chain = sample_gas_gibbs(bg, params, rng, sweeps=3_100, burn_in=100,
                                     thin=10, init=init)
            chains.append(np.array([c.positions[0] for c in chain]))
        assert gelman_rubin(chains) < 1.05

    def test_yields_sorted_configurations(self, rng):
        for conf in sample_gas_gibbs(BG, P2, rng, sweeps=40, burn_in=20, thin=5):
            assert conf.positions[0] >= conf.positions[1]


class TestGaussianConditional:
    def test_single_particle_truncated_normal(self, rng):
        params = GasParams(1, 1.0, 2.0)
        a, b = -1.0, 0.0
        samples, _ = sample_gas_gaussian_conditional(a, b, params, rng, size=200_000)
        mu = gaussian_conditional_means(a, b, params)[0]
        sd = math.sqrt(gaussian_conditional_variance(a, b, params))
        assert mu == pytest.approx(-0.5)
        assert sd**2 == pytest.approx(0.5)
        tn = sps.truncnorm((a - mu) / sd, (b - mu) / sd, loc=mu, scale=sd)
        x = samples[:, 0]
        assert x.mean() == pytest.approx(tn.mean(), abs=4 * math.sqrt(tn.var() / x.size))

    def test_matches_general_sampler_conditioned_on_containment(self, rng):
        params = GasParams(2, 2.0, 2.5)
        bg = uniform_bg(2.5)
        gauss, _ = sample_gas_gaussian_conditional(-1.0, 0.0, params, rng, size=30_000)
        full, _ = sample_gas_rejection(bg, params, rng, size=150_000)
        contained = full[(full[:, 0] <= 0.0) & (full[:, -1] >= -1.0)]
        d = ks_statistic(EmpiricalDistribution.from_samples(gauss[:, 0]),
                         EmpiricalDistribution.from_samples(contained[:, 0]))
        assert d < two_sample_band(gauss.shape[0], contained.shape[0], 0.99)

    def test_scale_invariance_of_conditional_law(self, rng):
        # scaling beta by sigma and positions by 1/sigma preserves the law
        sigma = 2.0
        params = GasParams(2, 2.0, 2.5)
        scaled = GasParams(2, 2.0 / sigma, 2.5)
        base, _ = sample_gas_gaussian_conditional(-1.0, 0.0, params, rng, size=30_000)
        dil, _ = sample_gas_gaussian_conditional(-sigma, 0.0, scaled, rng, size=30_000)
        d = ks_statistic(EmpiricalDistribution.from_samples(sigma * base[:, 0]),
                         EmpiricalDistribution.from_samples(dil[:, 0]))
        assert d < two_sample_band(30_000, 30_000, 0.99)


class TestPartitionFunction:
    def test_single_particle_matches_quadrature(self, rng):
        p1 = GasParams(1, 1.0, 1.0)
        bg = uniform_bg(1.0)
        log_z, se = estimate_log_partition(bg, p1, rng, samples=100)
        pot = bg.phi_pieces()
        z, _ = integrate.quad(lambda t: math.exp(-pot(t)), -60, 60)
        assert se == 0.0
        assert log_z == pytest.approx(math.log(z), abs=1e-6)

    def test_two_particles_match_2d_quadrature(self, rng):
        params = GasParams(2, 1.0, 3.0)
        bg = uniform_bg(3.0)
        log_z, se = estimate_log_partition(bg, params, rng, samples=400_000)
        pot = bg.phi_pieces()

        def integrand(x2, x1):  # ordered region x2 <= x1, kink-free
            return math.exp(-(-(x1 - x2) / 2.0 + pot(x1) + pot(x2)))

        val, err = integrate.dblquad(integrand, -14.0, 12.0,
                                     lambda x1: -14.0, lambda x1: x1,
                                     epsabs=1e-9)
        expected = math.log(2.0 * val)
        assert log_z == pytest.approx(expected, abs=3 * se + 1e-6)

    def test_inadmissible_raises(self, rng):
        with pytest.raises(InadmissibleGas):
            estimate_log_partition(uniform_bg(1.0), GasParams(2, 1.0, 1.0), rng)


class TestScaleInvariance:
    def test_top_coordinate_law(self, rng):
        # sigma * X under (alpha, beta, rho) = X under (alpha, beta/sigma, dil rho)
        sigma = 2.0
        params = GasParams(2, 1.0, 2.5)
        bg = uniform_bg(2.5)
        base, _ = sample_gas_rejection(bg, params, rng, size=30_000)
        dil_params = GasParams(2, 1.0 / sigma, 2.5)
        dil_bg = bg.dilate(sigma)
        dil, _ = sample_gas_rejection(dil_bg, dil_params, rng, size=30_000)
        d = ks_statistic(EmpiricalDistribution.from_samples(sigma * base[:, 0]),
                         EmpiricalDistribution.from_samples(dil[:, 0]))
        assert d < two_sample_band(30_000, 30_000, 0.99)
