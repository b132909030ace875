"""Samplers for the limiting edge point processes of the jellium.

Three limit families arise, indexed by the confining potential of the i-th
coordinate: a hard wall at 0 with linear tilts (half-well), a left quadratic
well with tilts i-1+lambda, and a left quadratic well with an x^gamma/gamma
right wing and tilts i-1/2. The half-well gas is exactly representable: its
top-k coordinates are tail partial sums (2/beta) sum_{i>=j} Z_i/(i(2l-1+i))
of independent unit exponentials, so gaps are independent exponentials. The
other families are approximated by conditioning m independent coordinates on
a full ordering; the approximation is stochastically increasing in m and
sandwiched between the finite-m law and a dominating half-well gas.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .background import BackgroundSpec, GammaFamily, UniformInterval
from .exceptions import DepthTooSmall, MaxAttemptsExceeded
from .finite_gas import GasParams, sample_gas_gibbs_ensemble
from .piecewise import (CompiledDensity, LinearPiece, PiecewisePotential,
                        PowerPiece, QuadraticPiece)
from .stats import EmpiricalDistribution, ks_statistic, two_sample_band


@dataclass(frozen=True)
class HalfWell:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("need lambda > 0")


@dataclass(frozen=True)
class SquaredZero:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("need lambda > 0")


@dataclass(frozen=True)
class SquaredGamma:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError("need gamma > 1")


@dataclass(frozen=True)
class LimitFamily:
    variant: object
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("need beta > 0")

    def tilt(self, i):
        v = self.variant
        if isinstance(v, (HalfWell, SquaredZero)):
            return i - 1.0 + v.lam
        return i - 0.5

    def coordinate_potential(self, i):
        """Potential of the i-th independent coordinate before ordering."""
        v = self.variant
        t = self.tilt(i)
        if isinstance(v, HalfWell):
            return PiecewisePotential([LinearPiece(0.0, np.inf, t, 0.0)])
        if isinstance(v, SquaredZero):
            return PiecewisePotential([QuadraticPiece(-np.inf, 0.0, 1.0, 0.0, 0.0),
                                       LinearPiece(0.0, np.inf, 0.0, 0.0)]).tilted(t)
        return PiecewisePotential([QuadraticPiece(-np.inf, 0.0, 1.0, 0.0, 0.0),
                                   PowerPiece(0.0, np.inf, v.gamma, 0.0, 0.0)]).tilted(t)


def dominating_halfwell(family: LimitFamily) -> LimitFamily:
    """Half-well gas with matching tilts; stochastically dominates the family
    coordinate-wise after ordering (the extra potential is nondecreasing on
    the common domain)."""
    v = family.variant
    lam = v.lam if isinstance(v, (HalfWell, SquaredZero)) else 0.5
    return LimitFamily(HalfWell(lam), family.beta)


@dataclass(frozen=True)
class TopKSample:
    """The k right-most points, descending, with the truncation depth used."""

    values: np.ndarray
    depth_m: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if np.any(vals[:-1] < vals[1:]):
            raise ValueError("top-k values must be descending")
        object.__setattr__(self, "values", vals)


# ---------------------------------------------------------------------------
# half-well partial sums

def _halfwell_tail_mean(c, m):
    """sum_{i>m} 1/(i*(i+c)) in closed form."""
    if c == 0.0:
        return float(special.polygamma(1, m + 1))
    return float((special.digamma(m + 1 + c) - special.digamma(m + 1)) / c)


def _halfwell_tail_sq(c, m):
    """sum_{i>m} 1/(i*(i+c))**2 in closed form."""
    if c == 0.0:
        return float(special.polygamma(3, m + 1) / 6.0)
    t1 = special.polygamma(1, m + 1) + special.polygamma(1, m + 1 + c)
    t2 = special.digamma(m + 1 + c) - special.digamma(m + 1)
    return float(t1 / c**2 - 2.0 * t2 / c**3)


def halfwell_depth(lam, beta, eps):
    """Smallest power-of-two depth whose compensated residual std is below eps.

    With the discarded tail replaced by its exact mean, the remaining error
    is the centered tail sum, of standard deviation (2/beta)*sqrt(tail_sq)."""
    c = 2.0 * lam - 1.0
    m = 64
    while (2.0 / beta) * math.sqrt(_halfwell_tail_sq(c, m)) >= eps:
        m *= 2
        if m > 2**22:
            raise ValueError("eps too small for a practical truncation depth")
    return m


def halfwell_topk_mean(lam, beta, k):
    """E[X_(j)] = (2/beta) sum_{i>=j} 1/(i(2*lam-1+i)) for j = 1..k."""
    c = 2.0 * lam - 1.0
    return np.array([(2.0 / beta) * _halfwell_tail_mean(c, j - 1) for j in range(1, k + 1)])


def halfwell_topk_var(lam, beta, k):
    c = 2.0 * lam - 1.0
    return np.array([(2.0 / beta) ** 2 * _halfwell_tail_sq(c, j - 1) for j in range(1, k + 1)])


def _halfwell_partial_sums(lam, beta, k, m, rng, size, tail_mean=0.0, chunk_cells=25_000_000):
    """(size, k) tail partial sums over depth m plus a constant tail compensation."""
    c = 2.0 * lam - 1.0
    i = np.arange(1, m + 1, dtype=float)
    w = (2.0 / beta) / (i * (i + c))
    out = np.empty((size, k))
    step = max(1, int(chunk_cells // m))
    done = 0
    while done < size:
        rows = min(step, size - done)
        z = rng.standard_exponential((rows, m))
        x = np.empty((rows, k))
        x[:, 0] = z @ w + tail_mean
        for j in range(1, k):
            x[:, j] = x[:, j - 1] - z[:, j - 1] * w[j - 1]
        out[done:done + rows] = x
        done += rows
    return out


def sample_halfwell_topk(lam, beta, k, rng, eps=1e-4, size=None, depth=None):
    """Top-k of the infinite half-well gas via exponential partial sums.

    The series is truncated at a depth where the compensated residual has
    standard deviation below ``eps``; the discarded tail is replaced by its
    exact mean (digamma closed form), so all means are exact and the gaps
    between returned coordinates are exactly independent exponentials.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    m = depth if depth is not None else halfwell_depth(lam, beta, eps)
    if m < k:
        raise DepthTooSmall(f"depth {m} below k={k}")
    c = 2.0 * lam - 1.0
    tail = (2.0 / beta) * _halfwell_tail_mean(c, m)
    vals = _halfwell_partial_sums(lam, beta, k, m, rng, 1 if size is None else int(size),
                                  tail_mean=tail)
    if size is None:
        return TopKSample(vals[0], m)
    return vals


# ---------------------------------------------------------------------------
# general limit families at finite conditioning depth

def _family_compiled(family, m):
    return [CompiledDensity(family.coordinate_potential(i), family.beta)
            for i in range(1, m + 1)]


def sample_limit_topk(family, k, depth_m, rng, size=None, method="auto",
                      sweeps=300, max_attempts=10**8):
    """Top-k of the family's edge process approximated at conditioning depth m.

    Conditions m independent coordinates on a full ordering and keeps the top
    k; the law is stochastically increasing in m toward the limit. The
    half-well family short-circuits to the exact change-of-variables partial
    sums truncated at m. ``method`` selects rejection (exact, cost grows
    quickly with m) or a vectorized ensemble of Gibbs chains.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if depth_m < k:
        raise DepthTooSmall(f"depth m={depth_m} below k={k}")
    want = 1 if size is None else int(size)

    # the half-well conditioning law at depth m IS the truncated partial-sum
    # law (change of variables), so "exact" bypasses the conditioning
    if method in ("auto", "exact") and isinstance(family.variant, HalfWell):
        vals = _halfwell_partial_sums(family.variant.lam, family.beta, k,
                                      depth_m, rng, want)
        if size is None:
            return TopKSample(vals[0], depth_m)
        return vals
    if method == "exact":
        raise ValueError("exact truncation is available only for the half-well family")

    if method == "auto":
        method = "rejection" if depth_m <= 12 else "gibbs"

    if method == "rejection":
        compiled = _family_compiled(family, depth_m)
        got, n_have, attempted = [], 0, 0
        while n_have < want:
            batch = min(max(4 * want, 4096), 2_000_000, max_attempts - attempted)
            if batch <= 0:
                raise MaxAttemptsExceeded(
                    f"accepted {n_have}/{want} after {attempted} attempts",
                    attempted=attempted, accepted=n_have)
            y = np.column_stack([cd.sample(rng, batch) for cd in compiled])
            attempted += batch
            keep = y[np.all(y[:, :-1] >= y[:, 1:], axis=1)]
            if keep.shape[0]:
                got.append(keep[:want - n_have, :k])
                n_have += got[-1].shape[0]
        vals = np.vstack(got)
    elif method == "gibbs":
        compiled = _family_compiled(family, depth_m)
        state = np.sort(np.column_stack([cd.sample(rng, want) for cd in compiled]),
                        axis=1)[:, ::-1].copy()
        for _ in range(sweeps):
            for j in range(depth_m):
                lo = state[:, j + 1] if j + 1 < depth_m else np.full(want, -np.inf)
                hi = state[:, j - 1] if j > 0 else np.full(want, np.inf)
                state[:, j] = compiled[j].sample_truncated(rng, lo, hi)
        vals = state[:, :k].copy()
    else:
        raise ValueError(f"unknown method {method!r}")

    if size is None:
        return TopKSample(vals[0], depth_m)
    return vals


# ---------------------------------------------------------------------------
# Gumbel functional

def gumbel_mean(chi, tail_below=1e-10):
    """E[M_chi] = sum_k chi/(k(chi+k)), summed directly with an exact
    digamma remainder (the remainder itself is far below ``tail_below``)."""
    m = 4096
    k = np.arange(1, m + 1, dtype=float)
    partial = float(np.sum(chi / (k * (chi + k))))
    return partial + chi * _halfwell_tail_mean(chi, m)


def gumbel_statistic(chi, rng, samples, eps=5e-4):
    """Samples of M_chi - E[M_chi] where M_chi = sum_k chi Z_k/(k(chi+k)).

    Centered, these converge to a Gumbel shifted by minus the
    Euler-Mascheroni constant as chi grows.
    """
    if not chi > 0:
        raise ValueError("need chi > 0")
    m = 256
    while chi * math.sqrt(_halfwell_tail_sq(chi, m)) >= eps:
        m *= 2
    k = np.arange(1, m + 1, dtype=float)
    w = chi / (k * (chi + k))
    partial_mean = float(np.sum(w))
    out = np.empty(int(samples))
    step = max(1, int(25_000_000 // m))
    done = 0
    while done < samples:
        rows = min(step, int(samples) - done)
        z = rng.standard_exponential((rows, m))
        out[done:done + rows] = z @ w - partial_mean
        done += rows
    return EmpiricalDistribution.from_samples(out)


def gumbel_limit_cdf(x):
    """CDF of G - gamma_EM for a standard Gumbel G."""
    return np.exp(-np.exp(-(np.asarray(x, dtype=float) + np.euler_gamma)))


# ---------------------------------------------------------------------------
# finite gas against its limit

@dataclass(frozen=True)
class Regime:
    """A background sequence covered by one of the edge limit theorems."""

    name: str  # asymptotically_neutral | nonneutral | fixed_background
    beta: float
    lam: float = 1.0
    gamma: float = 2.0
    charge_rate: float = 2.0  # nonneutral: alpha_n = charge_rate * n
    rho: object = None        # fixed_background: probability variant near 0

    def gas(self, n):
        if self.name == "nonneutral":
            alpha = self.charge_rate * n
        else:
            alpha = (n - 1) + 2.0 * self.lam
        return GasParams(n, self.beta, alpha)

    def background(self, n):
        params = self.gas(n)
        if self.name == "asymptotically_neutral":
            return BackgroundSpec(UniformInterval(-params.alpha, 0.0), params.alpha)
        if self.name == "nonneutral":
            return BackgroundSpec(GammaFamily(n, self.gamma), params.alpha)
        if self.name == "fixed_background":
            rho = self.rho if self.rho is not None else UniformInterval(-1.0, 0.0)
            return BackgroundSpec(rho, params.alpha)
        raise ValueError(f"unknown regime {self.name!r}")

    def limit_family(self):
        if self.name == "asymptotically_neutral":
            return LimitFamily(SquaredZero(self.lam), self.beta)
        if self.name == "nonneutral":
            return LimitFamily(SquaredGamma(self.gamma), self.beta)
        if self.name == "fixed_background":
            return LimitFamily(HalfWell(self.lam), self.beta)
        raise ValueError(f"unknown regime {self.name!r}")


def finite_to_limit_distance(regime: Regime, k, n_list, samples, rng,
                             sweeps=200, limit_depth=128, confidence=0.99):
    """KS distance between finite-gas and limit top-k, per coordinate and n.

    The finite gas is sampled by the Gibbs chain ensemble; the limit by exact
    partial sums (half-well) or a deep-conditioning ensemble. Rows report the
    distance and the two-sample band at the requested confidence. No
    convergence rate is certified; distances should fall below the band as n
    grows, per the edge limit theorems.
    """
    family = regime.limit_family()
    if isinstance(family.variant, HalfWell):
        limit_vals = sample_halfwell_topk(family.variant.lam, family.beta, k,
                                          rng, size=samples)
        depth_used = halfwell_depth(family.variant.lam, family.beta, 1e-4)
    else:
        limit_vals = sample_limit_topk(family, k, limit_depth, rng, size=samples,
                                       method="gibbs", sweeps=sweeps)
        depth_used = limit_depth
    limit_emp = [EmpiricalDistribution.from_samples(limit_vals[:, j]) for j in range(k)]

    rows = []
    for n in n_list:
        if n < k:
            raise ValueError(f"n={n} smaller than k={k}")
        bg = regime.background(n)
        params = regime.gas(n)
        finite = sample_gas_gibbs_ensemble(bg, params, rng, size=samples, sweeps=sweeps)
        for j in range(k):
            emp = EmpiricalDistribution.from_samples(finite[:, j])
            rows.append({
                "n": int(n),
                "coordinate": j + 1,
                "ks": ks_statistic(emp, limit_emp[j]),
                "band": two_sample_band(samples, samples, confidence),
                "samples": int(samples),
                "limit_depth": int(depth_used),
            })
    return rows
