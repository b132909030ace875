import math

import numpy as np
import pytest

from jellium1d.background import BackgroundSpec, FixedDensity, UniformInterval
from jellium1d.finite_gas import GasParams
from jellium1d.order_stats import (ConditionalSpec, conditional_moments,
                                   gap_means, sample_conditional_direct,
                                   sample_renyi_topk, yform_means)
from jellium1d.stats import (EmpiricalDistribution, dkw_band, ks_distance_to_cdf,
                             ks_statistic, two_sample_band)


def spec_for(n, k, alpha, beta, bg=None):
    background = bg if bg is not None else BackgroundSpec(
        UniformInterval(-1.0, 0.0), alpha)
    return ConditionalSpec(GasParams(n, beta, alpha), background, k)


class TestClosedForms:
    def test_both_forms_coincide_at_k_one(self):
        s = spec_for(3, 1, 3.5, 1.0)
        assert gap_means(s)[0] == pytest.approx(4.0 / 3.0)
        assert yform_means(s)[0] == pytest.approx(4.0 / 3.0)
        assert conditional_moments(s)[0][0] == pytest.approx(4.0 / 3.0)

    def test_top_mean_sums_gap_means(self):
        # n=5, k=2, alpha=6, beta=2: 2/(2*1*2) + 2/(2*2*3) = 2/3
        s = spec_for(5, 2, 6.0, 2.0)
        mean_top = conditional_moments(s)[0][0]
        assert mean_top == pytest.approx(2.0 / 3.0)

    def test_gap_additivity(self):
        s = spec_for(6, 4, 6.5, 1.0)
        moments = conditional_moments(s)
        gm = gap_means(s)
        # mean X_(1) - mean X_(2) is the mean of the top gap Z_1
        assert moments[0][0] - moments[1][0] == pytest.approx(gm[0])

    def test_variances_accumulate_squared_gap_means(self):
        s = spec_for(4, 3, 5.0, 2.0)
        gm = gap_means(s)
        moments = conditional_moments(s)
        assert moments[-1][1] == pytest.approx(gm[-1] ** 2)
        assert moments[0][1] == pytest.approx(np.sum(gm**2))


class TestRenyiSampler:
    def test_moments_match_closed_forms(self, rng):
        s = spec_for(5, 3, 5.5, 1.0)
        vals = sample_renyi_topk(s, rng, size=200_000)
        for j, (mean, var) in enumerate(conditional_moments(s)):
            se = math.sqrt(var / vals.shape[0])
            assert vals[:, j].mean() == pytest.approx(mean, abs=4 * se)
            assert vals[:, j].var() == pytest.approx(var, rel=0.05)

    def test_descending_rows(self, rng):
        vals = sample_renyi_topk(spec_for(4, 4, 5.0, 2.0), rng, size=1000)
        assert np.all(vals[:, :-1] >= vals[:, 1:])

    def test_beta_is_a_scale_parameter(self, rng):
        base = sample_renyi_topk(spec_for(4, 2, 5.0, 1.0), rng, size=50_000)
        halved = sample_renyi_topk(spec_for(4, 2, 5.0, 2.0), rng, size=50_000)
        d = ks_statistic(EmpiricalDistribution.from_samples(base[:, 0]),
                         EmpiricalDistribution.from_samples(2.0 * halved[:, 0]))
        assert d < two_sample_band(50_000, 50_000, 0.99)

    def test_single_draw_shape(self, rng):
        top = sample_renyi_topk(spec_for(3, 2, 3.5, 1.0), rng)
        assert top.values.shape == (2,)
        assert top.values[0] >= top.values[1]


class TestDirectSampler:
    def test_k_zero_returns_empty(self, rng):
        vals, report = sample_conditional_direct(spec_for(2, 0, 2.5, 1.0), rng,
                                                 size=500)
        assert vals.shape == (500, 0)
        assert 0.0 < report.event_prob < 1.0
        assert report.accepted == 500

    def test_matches_renyi_top_coordinate(self, rng):
        s = spec_for(3, 1, 3.5, 1.0)
        direct, report = sample_conditional_direct(s, rng, size=20_000,
                                                   max_attempts=10**8)
        renyi = sample_renyi_topk(s, rng, size=100_000)
        d = ks_statistic(EmpiricalDistribution.from_samples(direct[:, 0]),
                         EmpiricalDistribution.from_samples(renyi[:, 0]))
        assert d < two_sample_band(direct.shape[0], renyi.shape[0], 0.99)
        assert report.event_prob > 0.0

    def test_matches_renyi_all_coordinates_k_equals_n(self, rng):
        s = spec_for(3, 3, 3.5, 1.0)
        direct, _ = sample_conditional_direct(s, rng, size=5_000,
                                              max_attempts=10**8)
        renyi = sample_renyi_topk(s, rng, size=50_000)
        for j in range(3):
            d = ks_statistic(EmpiricalDistribution.from_samples(direct[:, j]),
                             EmpiricalDistribution.from_samples(renyi[:, j]))
            assert d < two_sample_band(direct.shape[0], renyi.shape[0], 0.99)

    def test_gap_independence_of_direct_sampler(self, rng):
        s = spec_for(3, 2, 3.5, 1.0)
        direct, _ = sample_conditional_direct(s, rng, size=20_000,
                                              max_attempts=10**8)
        gm = gap_means(s)
        bottom = direct[:, 1]           # X_(2) = Z_2
        gap = direct[:, 0] - direct[:, 1]  # top gap Z_1
        for samplev, mean in ((bottom, gm[1]), (gap, gm[0])):
            emp = EmpiricalDistribution.from_samples(samplev)
            d = ks_distance_to_cdf(emp, lambda t, m=mean: 1.0 - np.exp(-np.clip(t, 0, None) / m))
            assert d < dkw_band(emp.count, 0.999)
        corr = np.corrcoef(bottom, gap)[0, 1]
        assert abs(corr) < 4.0 / math.sqrt(direct.shape[0])

    def test_background_shape_independence(self, rng):
        shape_a = BackgroundSpec(
            FixedDensity.normalized([(-1.0, 1.0), (0.0, 1.0)]), 3.5)
        shape_b = BackgroundSpec(
            FixedDensity.normalized([(-2.0, 1.4), (-1.2, 0.1), (0.0, 1.0)]), 3.5)
        out = {}
        for name, bg in (("a", shape_a), ("b", shape_b)):
            s = spec_for(3, 1, 3.5, 1.0, bg=bg)
            vals, _ = sample_conditional_direct(s, rng, size=15_000,
                                                max_attempts=10**8)
            out[name] = EmpiricalDistribution.from_samples(vals[:, 0])
        assert ks_statistic(out["a"], out["b"]) < two_sample_band(
            out["a"].count, out["b"].count, 0.99)


class TestSpecValidation:
    def test_support_must_stay_left_of_zero(self):
        bg = BackgroundSpec(UniformInterval(-1.0, 0.5), 3.5)
        with pytest.raises(ValueError):
            ConditionalSpec(GasParams(3, 1.0, 3.5), bg, 1)

    def test_k_range(self):
        with pytest.raises(ValueError):
            spec_for(3, 4, 3.5, 1.0)
        with pytest.raises(ValueError):
            spec_for(3, -1, 3.5, 1.0)

    def test_inadmissible_gas_rejected(self):
        from jellium1d.exceptions import InadmissibleGas
        with pytest.raises(InadmissibleGas):
            spec_for(3, 1, 2.0, 1.0)
