"""Statistical harness: ECDFs, KS distances, DKW bands, dominance verdicts,
tail-exponent fits, and chain diagnostics.

All comparisons are distribution-free.  Two-sample comparisons use the
conservative sum of one-sample DKW half-widths instead of an exact two-sample
law, so a verdict never depends on a parametric assumption.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import WindowTooDeep


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted i.i.d. samples with ECDF and quantile queries."""

    samples: np.ndarray  # ascending, 1-d

    def __post_init__(self):
        xs = np.asarray(self.samples, dtype=float)
        if xs.ndim != 1 or xs.size < 1:
            raise ValueError("need at least one sample in a flat array")
        object.__setattr__(self, "samples", xs)

    @classmethod
    def from_samples(cls, xs):
        return cls(np.sort(np.asarray(xs, dtype=float)))

    @property
    def count(self):
        return self.samples.size

    def ecdf(self, t):
        """Right-continuous empirical CDF evaluated at ``t`` (scalar or array)."""
        return np.searchsorted(self.samples, t, side="right") / self.count

    def survival(self, t):
        return 1.0 - self.ecdf(t)

    def quantile(self, q):
        """Empirical quantile (inverse ECDF) at level(s) ``q``."""
        q = np.asarray(q, dtype=float)
        idx = np.clip(np.ceil(q * self.count).astype(int) - 1, 0, self.count - 1)
        return self.samples[idx]


def dkw_band(count, confidence):
    """One-sample Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta)/(2N)).

    ``confidence`` is 1 - delta; confidence = 0 gives the minimal ln(2) band.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 <= confidence < 1.0:
        raise ValueError("confidence must lie in [0, 1)")
    delta = 1.0 - confidence
    return math.sqrt(math.log(2.0 / delta) / (2.0 * count))


def two_sample_band(count_p, count_q, confidence):
    """Conservative two-sample band: sum of the one-sample half-widths."""
    return dkw_band(count_p, confidence) + dkw_band(count_q, confidence)


def ks_statistic(p: EmpiricalDistribution, q: EmpiricalDistribution):
    """Sup-norm distance between the two ECDFs."""
    grid = np.concatenate([p.samples, q.samples])
    grid.sort(kind="mergesort")
    return float(np.max(np.abs(p.ecdf(grid) - q.ecdf(grid))))


def ks_distance_to_cdf(p: EmpiricalDistribution, cdf):
    """One-sample KS distance of the ECDF against an analytic CDF callable."""
    f = np.asarray(cdf(p.samples), dtype=float)
    n = p.count
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return float(max(upper, lower))


class DominanceVerdict(enum.Enum):
    DOMINATES = "Dominates"
    DOMINATED = "Dominated"
    CROSSING = "Crossing"
    INCONCLUSIVE = "Inconclusive"


def dominance_check(p: EmpiricalDistribution, q: EmpiricalDistribution, confidence=0.99):
    """Band-separated stochastic-dominance verdict.

    ``DOMINATES`` means p is stochastically larger than q: F_p stays below
    F_q + band everywhere and dips below F_q - band somewhere.  ``CROSSING``
    means both strict violations occur; anything else is ``INCONCLUSIVE``.
    """
    band = two_sample_band(p.count, q.count, confidence)
    grid = np.concatenate([p.samples, q.samples])
    grid.sort(kind="mergesort")
    fp = p.ecdf(grid)
    fq = q.ecdf(grid)
    p_above_band = bool(np.any(fp > fq + band))  # p smaller somewhere
    p_below_band = bool(np.any(fp < fq - band))  # p larger somewhere
    if p_below_band and not p_above_band:
        return DominanceVerdict.DOMINATES
    if p_above_band and not p_below_band:
        return DominanceVerdict.DOMINATED
    if p_above_band and p_below_band:
        return DominanceVerdict.CROSSING
    return DominanceVerdict.INCONCLUSIVE


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit of -log(survival) against t**gamma over a window.

    The residual profile is reported so the vanishing correction in the tail
    law is visible instead of being assumed zero.
    """

    gamma_hypothesis: float
    fitted_coefficient: float
    fit_window: tuple  # (t_lo, t_hi)
    r_squared: float
    residuals: np.ndarray


def tail_exponent_fit(p: EmpiricalDistribution, gamma_hypothesis, window=(1e-4, 1e-1),
                      max_points=256):
    """Fit the leading tail exponent coefficient of ``p``.

    ``window`` is given in survival-probability coordinates (s_lo, s_hi) with
    s_lo < s_hi, which keeps the window scale-free; the returned ``fit_window``
    holds the corresponding t-range.  Requires at least 50 samples beyond the
    deepest level so the relative error of the empirical survival is bounded.
    """
    s_lo, s_hi = window
    if not 0.0 < s_lo < s_hi < 1.0:
        raise ValueError("survival window must satisfy 0 < s_lo < s_hi < 1")
    n = p.count
    if s_lo * n < 50:
        raise WindowTooDeep(
            f"survival {s_lo:g} at the deep end leaves {s_lo * n:.0f} < 50 samples")
    # order statistics with empirical survival (n - i - 1)/n at sorted index i
    surv = (n - np.arange(1, n + 1)) / n
    mask = (surv >= s_lo) & (surv <= s_hi)
    idx = np.nonzero(mask)[0]
    if idx.size < 8:
        raise WindowTooDeep("fewer than 8 order statistics inside the window")
    if idx.size > max_points:
        # subsample evenly in log-survival so the dense shallow end does not
        # dominate the regression
        levels = np.exp(np.linspace(np.log(surv[idx[0]]), np.log(surv[idx[-1]]),
                                    max_points))
        idx = np.unique(np.searchsorted(-surv, -levels))
        idx = idx[(surv[idx] >= s_lo) & (surv[idx] <= s_hi)]
    t = p.samples[idx]
    y = -np.log(surv[idx])
    x = np.power(t, gamma_hypothesis)
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    resid = y - fitted
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return TailFit(
        gamma_hypothesis=float(gamma_hypothesis),
        fitted_coefficient=float(coef[0]),
        fit_window=(float(t.min()), float(t.max())),
        r_squared=r2,
        residuals=resid,
    )


def gelman_rubin(chains):
    """Potential scale reduction factor over a list of equal-length 1-d chains."""
    chains = [np.asarray(c, dtype=float) for c in chains]
    m = len(chains)
    if m < 2:
        raise ValueError("need at least two chains")
    n = min(c.size for c in chains)
    data = np.stack([c[:n] for c in chains])
    chain_means = data.mean(axis=1)
    chain_vars = data.var(axis=1, ddof=1)
    w = chain_vars.mean()
    b = n * chain_means.var(ddof=1)
    var_hat = (n - 1) / n * w + b / n
    return float(np.sqrt(var_hat / w))
