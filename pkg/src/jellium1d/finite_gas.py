"""Exact and Markov-chain samplers for the n-particle Boltzmann-Gibbs gas.

The gas at inverse temperature beta with background charge alpha exists iff
alpha > n-1. Its order statistics coincide in law with n independent tilted
variables Y_i conditioned on being descending, where Y_i follows the density
proportional to exp(-beta * V_i) and V_i is the per-particle potential
((2i-1-n)/2) x + phi(x). Rejection on the ordering gives exact samples; a
systematic-scan Gibbs chain on the ordered representation covers the regimes
where the ordering probability is impractically small.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .background import BackgroundSpec, GammaFamily, minus_potential, per_particle_potential
from .exceptions import InadmissibleGas, MaxAttemptsExceeded, UnsortedInput
from .piecewise import CompiledDensity

DEFAULT_MAX_ATTEMPTS = 10**7
DEFAULT_BURN_IN = 1000
DEFAULT_THIN = 10


@dataclass(frozen=True)
class GasParams:
    """(n, beta, alpha); the Gibbs measure exists iff alpha > n - 1."""

    n: int
    beta: float
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")
        if not self.beta > 0:
            raise ValueError("need beta > 0")
        if not self.alpha > 0:
            raise ValueError("need alpha > 0")

    @property
    def admissible(self):
        return self.alpha > self.n - 1

    def require_admissible(self):
        if not self.admissible:
            raise InadmissibleGas(
                f"gas is defined only for alpha > n - 1; got alpha={self.alpha}, n={self.n}")


@dataclass(frozen=True)
class Configuration:
    """Descending-sorted particle positions with the cached total energy."""

    positions: np.ndarray
    energy: float

    @classmethod
    def from_positions(cls, positions, bg, params):
        xs = np.sort(np.asarray(positions, dtype=float))[::-1].copy()
        return cls(xs, float(energy_ordered(xs, bg, params)))


def _check_gas(bg: BackgroundSpec, params: GasParams):
    params.require_admissible()
    if isinstance(bg.variant, GammaFamily) and bg.variant.n != params.n:
        raise ValueError("gamma-family background was built for a different n")


def energy_pairwise(positions, bg: BackgroundSpec, params: GasParams):
    """-1/2 sum_{i<j} |x_i-x_j| + sum_i phi(x_i); accepts (n,) or (batch, n).

    Inputs are canonicalized by sorting so the result is exactly invariant
    under permutations (floating-point sums are order-dependent).
    """
    _check_gas(bg, params)
    x = np.sort(np.asarray(positions, dtype=float), axis=-1)
    pair = 0.5 * np.sum(np.abs(x[..., :, None] - x[..., None, :]), axis=(-2, -1)) / 2.0
    phi = bg.phi_pieces()
    return -pair + np.sum(phi(x).reshape(x.shape), axis=-1)


def energy_ordered(positions, bg: BackgroundSpec, params: GasParams):
    """Order-statistics form sum_k [((2k-n-1)/2) x_(k) + phi(x_(k))]; requires
    descending input. Equals energy_pairwise by the combinatorial identity."""
    _check_gas(bg, params)
    x = np.asarray(positions, dtype=float)
    if np.any(x[..., :-1] < x[..., 1:]):
        raise UnsortedInput("positions must be sorted descending")
    n = params.n
    k = np.arange(1, n + 1, dtype=float)
    coeff = (2.0 * k - n - 1.0) / 2.0
    phi = bg.phi_pieces()
    return np.sum(coeff * x + phi(x).reshape(x.shape), axis=-1)


def count_right_of_zero(config):
    """Number of particles strictly to the right of the background edge at 0."""
    xs = config.positions if isinstance(config, Configuration) else np.asarray(config)
    return int(np.sum(xs > 0.0))


@lru_cache(maxsize=4096)
def _compiled(bg: BackgroundSpec, params: GasParams, i: int) -> CompiledDensity:
    pot = per_particle_potential(bg, params, i)
    return CompiledDensity(pot.pieces, params.beta)


def sample_independent(bg, params, i, rng, size=None):
    """Exact draw(s) from the i-th tilted density, proportional to
    exp(-beta * V_i)."""
    _check_gas(bg, params)
    cd = _compiled(bg, params, i)
    out = cd.sample(rng, 1 if size is None else int(size))
    return float(out[0]) if size is None else out


def _draw_components(bg, params, rng, batch):
    cols = [_compiled(bg, params, i).sample(rng, batch) for i in range(1, params.n + 1)]
    return np.column_stack(cols)


def sample_gas_rejection(bg, params, rng, size=None, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Exact gas samples: independent tilted draws accepted iff descending.

    Returns ``(Configuration, acceptance_rate)`` for ``size=None`` or
    ``((size, n) array of descending rows, acceptance_rate)``. Raises
    MaxAttemptsExceeded once the attempt budget is spent; the Gibbs sampler
    is the fallback in that regime.
    """
    _check_gas(bg, params)
    want = 1 if size is None else int(size)
    got, attempted, accepted, n_have = [], 0, 0, 0
    while n_have < want:
        batch = min(max(4 * want, 1024), 2_000_000, max_attempts - attempted)
        if batch <= 0:
            raise MaxAttemptsExceeded(
                f"accepted {n_have}/{want} after {attempted} attempts",
                attempted=attempted, accepted=n_have)
        y = _draw_components(bg, params, rng, batch)
        attempted += batch
        keep = y[np.all(y[:, :-1] >= y[:, 1:], axis=1)]
        accepted += keep.shape[0]
        if keep.shape[0]:
            got.append(keep[:want - n_have])
            n_have += got[-1].shape[0]
    rate = accepted / attempted
    samples = np.vstack(got) if got else np.empty((0, params.n))
    if size is None:
        xs = samples[0]
        return Configuration(xs, float(energy_ordered(xs, bg, params))), rate
    return samples, rate


def _gibbs_init(bg, params, rng, size):
    y = _draw_components(bg, params, rng, size)
    return np.sort(y, axis=1)[:, ::-1].copy()


def _gibbs_sweep(compiled, state, rng):
    n = state.shape[1]
    for j in range(n):
        lo = state[:, j + 1] if j + 1 < n else np.full(state.shape[0], -np.inf)
        hi = state[:, j - 1] if j > 0 else np.full(state.shape[0], np.inf)
        state[:, j] = compiled[j].sample_truncated(rng, lo, hi)


def sample_gas_gibbs(bg, params, rng, sweeps, burn_in=DEFAULT_BURN_IN,
                     thin=DEFAULT_THIN, init=None):
    """Systematic-scan Gibbs on the ordered representation (single chain).

    Coordinate k is redrawn from its tilted density truncated to the window
    of its neighbours. Yields post-burn-in states every ``thin`` sweeps.
    """
    _check_gas(bg, params)
    if sweeps <= burn_in:
        raise ValueError("need sweeps > burn_in")
    compiled = [_compiled(bg, params, i) for i in range(1, params.n + 1)]
    if init is None:
        state = _gibbs_init(bg, params, rng, 1)
    else:
        state = np.sort(np.asarray(init, dtype=float))[::-1].reshape(1, -1).copy()
    for sweep in range(1, sweeps + 1):
        _gibbs_sweep(compiled, state, rng)
        if sweep > burn_in and (sweep - burn_in) % thin == 0:
            xs = state[0].copy()
            yield Configuration(xs, float(energy_ordered(xs, bg, params)))


def sample_gas_gibbs_ensemble(bg, params, rng, size, sweeps=200, init=None):
    """One draw per independent Gibbs chain, run in vectorized lockstep.

    Each of the ``size`` chains starts from independently drawn sorted
    components and contributes exactly one state, so the returned rows are
    i.i.d. up to residual burn-in bias controlled by ``sweeps``.
    """
    _check_gas(bg, params)
    compiled = [_compiled(bg, params, i) for i in range(1, params.n + 1)]
    state = _gibbs_init(bg, params, rng, int(size)) if init is None \
        else np.asarray(init, dtype=float).copy()
    for _ in range(sweeps):
        _gibbs_sweep(compiled, state, rng)
    return state


def gaussian_conditional_means(a, b, params):
    """Means (a+b)/2 + (b-a)(n+1-2k)/(2 alpha) of the conditionally Gaussian
    representation for a uniform background on [a, b], k = 1..n descending."""
    k = np.arange(1, params.n + 1, dtype=float)
    return 0.5 * (a + b) + (b - a) * (params.n + 1.0 - 2.0 * k) / (2.0 * params.alpha)


def gaussian_conditional_variance(a, b, params):
    return (b - a) / (params.alpha * params.beta)


def sample_gas_gaussian_conditional(a, b, params, rng, size=None,
                                    max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Gas samples conditioned on every particle lying in [a, b], via the
    conditionally Gaussian representation for a uniform background.

    Draws independent Gaussians with the representation's means and variance
    and accepts iff a <= Y_n <= ... <= Y_1 <= b.
    """
    params.require_admissible()
    if not a < b:
        raise ValueError("need a < b")
    means = gaussian_conditional_means(a, b, params)
    sd = math.sqrt(gaussian_conditional_variance(a, b, params))
    want = 1 if size is None else int(size)
    got, attempted, accepted, n_have = [], 0, 0, 0
    while n_have < want:
        batch = min(max(4 * want, 1024), 2_000_000, max_attempts - attempted)
        if batch <= 0:
            raise MaxAttemptsExceeded(
                f"accepted {n_have}/{want} after {attempted} attempts",
                attempted=attempted, accepted=n_have)
        y = means[None, :] + sd * rng.standard_normal((batch, params.n))
        attempted += batch
        ok = np.all(y[:, :-1] >= y[:, 1:], axis=1) & (y[:, 0] <= b) & (y[:, -1] >= a)
        keep = y[ok]
        accepted += keep.shape[0]
        if keep.shape[0]:
            got.append(keep[:want - n_have])
            n_have += got[-1].shape[0]
    rate = accepted / attempted
    samples = np.vstack(got) if got else np.empty((0, params.n))
    if size is None:
        return samples[0], rate
    return samples, rate


def log_ordering_probability(bg, params, rng, samples):
    """Monte Carlo estimate of log P(Y_n <= ... <= Y_1) with its standard error."""
    _check_gas(bg, params)
    if params.n == 1:
        return 0.0, 0.0
    hits, total = 0, 0
    remaining = int(samples)
    while remaining > 0:
        batch = min(remaining, 2_000_000)
        y = _draw_components(bg, params, rng, batch)
        hits += int(np.sum(np.all(y[:, :-1] >= y[:, 1:], axis=1)))
        total += batch
        remaining -= batch
    if hits == 0:
        raise MaxAttemptsExceeded(
            "no ordered configuration observed; increase the sample budget",
            attempted=total, accepted=0)
    p = hits / total
    se = math.sqrt(p * (1.0 - p) / total) / p  # delta method on log p
    return math.log(p), se


def estimate_log_partition(bg, params, rng, samples=10**6):
    """log Z_n = log n! + sum_i log z_i + log P(ordering), with a Monte Carlo
    standard error from the ordering probability (the z_i are deterministic)."""
    _check_gas(bg, params)
    log_zs = sum(_compiled(bg, params, i).log_partition()
                 for i in range(1, params.n + 1))
    log_p, se = log_ordering_probability(bg, params, rng, samples)
    return math.lgamma(params.n + 1) + log_zs + log_p, se
