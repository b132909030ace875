"""Exact law of the k right-most particles conditioned on exactly k of them
lying beyond the background.

For a background supported in (-inf, 0] and an admissible gas, conditionally
on N = #{particles > 0} = k the gaps between consecutive top particles are
independent exponentials: X_(i) - X_(i+1) has mean 2/(beta*i*(alpha-n+i))
for i < k and X_(k) itself is the i = k term, so X_(j) = sum_{i=j..k} Z_i.
Equivalently the top-k are k independent exponentials with rates
(beta/2)(alpha-n-1+2i) conditioned on descending order in i. The gap index
runs from the top: the widest gap separates the two right-most particles,
consistent with the half-well limit where the same formula holds with
alpha - n + i replaced by 2*lambda - 1 + i. The representation never
references the background shape beyond its support, which the direct
rejection sampler cross-checks.
"""

from dataclasses import dataclass

import numpy as np

from .background import BackgroundSpec
from .edge_limits import TopKSample
from .exceptions import MaxAttemptsExceeded
from .finite_gas import GasParams, _check_gas, _draw_components

DEFAULT_MAX_ATTEMPTS = 10**7


@dataclass(frozen=True)
class ConditionalSpec:
    """Gas, background, and the conditioning count k (0 <= k <= n)."""

    params: GasParams
    bg: BackgroundSpec
    k: int

    def __post_init__(self):
        self.params.require_admissible()
        _check_gas(self.bg, self.params)
        if not 0 <= self.k <= self.params.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}")
        _, right = self.bg.support()
        if right > 0.0:
            raise ValueError("background support must lie inside (-inf, 0]")


def gap_means(spec: ConditionalSpec):
    """E Z_i = 2/(beta*i*(alpha-n+i)); Z_i is the gap below the i-th largest
    particle (Z_k is the position of the lowest conditioned particle)."""
    p = spec.params
    i = np.arange(1, spec.k + 1, dtype=float)
    return 2.0 / (p.beta * i * (p.alpha - p.n + i))


def yform_means(spec: ConditionalSpec):
    """Means 2/(beta*(alpha-n-1+2i)) of the equivalent ordered-exponential form."""
    p = spec.params
    i = np.arange(1, spec.k + 1, dtype=float)
    return 2.0 / (p.beta * (p.alpha - p.n - 1.0 + 2.0 * i))


def conditional_moments(spec: ConditionalSpec):
    """(mean, variance) of X_(1) >= ... >= X_(k) given N = k, in that order.

    X_(j) = sum_{i=j}^{k} Z_i, so means accumulate the gap means from the
    bottom index up and variances accumulate their squares.
    """
    gm = gap_means(spec)
    means = np.cumsum(gm[::-1])[::-1]
    variances = np.cumsum(gm[::-1] ** 2)[::-1]
    return list(zip(means.tolist(), variances.tolist()))


def sample_renyi_topk(spec: ConditionalSpec, rng, size=None):
    """Exact draw(s) of (X_(1), ..., X_(k)) given N = k via gap partial sums."""
    want = 1 if size is None else int(size)
    gm = gap_means(spec)
    z = rng.standard_exponential((want, spec.k)) * gm[None, :]
    vals = np.cumsum(z[:, ::-1], axis=1)[:, ::-1]
    if size is None:
        return TopKSample(vals[0], spec.k)
    return vals


@dataclass(frozen=True)
class DirectReport:
    """Empirical accounting of the direct conditional sampler."""

    event_prob: float  # P(N = k) among exact gas samples
    accepted: int      # conditional samples returned
    attempted: int     # exact gas samples inspected

    def to_dict(self):
        return {"event_prob": self.event_prob, "accepted": self.accepted,
                "attempted": self.attempted}


def sample_conditional_direct(spec: ConditionalSpec, rng, size=None,
                              max_attempts=DEFAULT_MAX_ATTEMPTS,
                              on_budget="raise"):
    """Oracle sampler: plain rejection of exact gas samples on {N = k}.

    Draws the full gas by ordering-rejection and keeps the top k of samples
    with exactly k particles right of zero; exact but possibly slow, and the
    empirical P(N = k) is reported so callers can budget. ``max_attempts``
    budgets raw component draws, as in the gas rejection sampler;
    ``on_budget="partial"`` returns whatever the budget yielded instead of
    raising.
    """
    params, k = spec.params, spec.k
    want = 1 if size is None else int(size)
    got, n_have = [], 0
    gas_seen, hits_seen, raw = 0, 0, 0
    while n_have < want:
        batch = min(max(8 * want, 8192), 2_000_000, max_attempts - raw)
        if batch <= 0:
            if on_budget == "partial" and size is not None:
                break
            raise MaxAttemptsExceeded(
                f"accepted {n_have}/{want} conditional samples after "
                f"{raw} raw attempts ({gas_seen} gas samples)",
                attempted=raw, accepted=n_have)
        y = _draw_components(spec.bg, params, rng, batch)
        raw += batch
        ordered = y[np.all(y[:, :-1] >= y[:, 1:], axis=1)]
        gas_seen += ordered.shape[0]
        counts = np.sum(ordered > 0.0, axis=1)
        hit = ordered[counts == k]
        hits_seen += hit.shape[0]
        if hit.shape[0]:
            got.append(hit[:want - n_have, :k])
            n_have += got[-1].shape[0]
    vals = np.vstack(got) if got else np.empty((0, k))
    report = DirectReport(event_prob=hits_seen / gas_seen if gas_seen else 0.0,
                          accepted=n_have, attempted=gas_seen)
    if size is None:
        return TopKSample(vals[0], k), report
    return vals, report
