"""Piecewise convex potentials and exact samplers for densities exp(-beta*V).

A potential is a contiguous list of convex pieces on the line. Linear pieces
give exponential densities (sampled by inversion), quadratic pieces give
Gaussians (sampled by a numerically stable truncated inverse-CDF in log
space), and power / polynomial pieces are sampled by rejection against an
adaptive tangent-line envelope: tangents of a convex function lie below it,
so the piecewise-exponential envelope dominates exactly and the accept test
uses the true potential. No envelope tuning is required; the refinement
drives the envelope gap below a fixed tolerance, which keeps the acceptance
rate above ~exp(-tol) on the region carrying all but a negligible fraction
of the mass.

Everything samples in vectorized form, optionally with a different
truncation window per draw (the Gibbs kernels rely on this).
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special
from numpy.polynomial.legendre import leggauss

from .exceptions import NonNormalizableDensity

_GL_NODES, _GL_WEIGHTS = leggauss(24)

# density e^{-gap} below which a region is treated as carrying no mass when
# placing envelope anchors (the accept test remains exact regardless)
_MASS_CUTOFF = 45.0


def log1mexp(t):
    """log(1 - exp(-t)) for t > 0, elementwise stable."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    small = t < math.log(2.0)
    out[small] = np.log(-np.expm1(-t[small]))
    out[~small] = np.log1p(-np.exp(-t[~small]))
    return out


def _log_ndtr_diff(za, zb):
    """log(Phi(zb) - Phi(za)) for za < zb, elementwise stable."""
    za = np.atleast_1d(np.asarray(za, dtype=float))
    zb = np.atleast_1d(np.asarray(zb, dtype=float))
    flip = za + zb > 0.0
    a = np.where(flip, -zb, za)
    b = np.where(flip, -za, zb)
    la = special.log_ndtr(a)
    lb = special.log_ndtr(b)
    return lb + log1mexp(np.maximum(lb - la, 1e-300))


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class LinearPiece:
    """V(x) = slope*x + offset on [lo, hi]."""

    lo: float
    hi: float
    slope: float
    offset: float

    def value(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.offset

    def deriv(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.slope)

    def tilted(self, c):
        return replace(self, slope=self.slope + c)

    def shifted(self, dc):
        return replace(self, offset=self.offset + dc)


@dataclass(frozen=True)
class QuadraticPiece:
    """V(x) = 0.5*curv*(x - center)**2 + offset on [lo, hi], curv > 0."""

    lo: float
    hi: float
    curv: float
    center: float
    offset: float

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return 0.5 * self.curv * d * d + self.offset

    def deriv(self, x):
        return self.curv * (np.asarray(x, dtype=float) - self.center)

    def tilted(self, c):
        center = self.center - c / self.curv
        offset = self.offset + c * self.center - c * c / (2.0 * self.curv)
        return replace(self, center=center, offset=offset)

    def shifted(self, dc):
        return replace(self, offset=self.offset + dc)


@dataclass(frozen=True)
class PowerPiece:
    """V(x) = scale*x**gamma/gamma + slope*x + offset on [lo, hi] with lo >= 0."""

    lo: float
    hi: float
    gamma: float
    slope: float
    offset: float
    scale: float = 1.0

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("power pieces live on the nonnegative axis")
        if self.gamma <= 1.0 or self.scale <= 0.0:
            raise ValueError("need gamma > 1 and scale > 0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return (self.scale / self.gamma) * np.power(x, self.gamma) \
            + self.slope * x + self.offset

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * np.power(x, self.gamma - 1.0) + self.slope

    def tilted(self, c):
        return replace(self, slope=self.slope + c)

    def shifted(self, dc):
        return replace(self, offset=self.offset + dc)


@dataclass(frozen=True)
class PolyPiece:
    """V(x) = polyval(coeffs, x) on a bounded [lo, hi]; must be convex there."""

    lo: float
    hi: float
    coeffs: tuple  # highest degree first

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("polynomial pieces need a bounded domain")

    def value(self, x):
        return np.polyval(self.coeffs, np.asarray(x, dtype=float))

    def deriv(self, x):
        return np.polyval(np.polyder(np.asarray(self.coeffs)), np.asarray(x, dtype=float))

    def tilted(self, c):
        coeffs = np.asarray(self.coeffs, dtype=float).copy()
        if coeffs.size < 2:
            coeffs = np.concatenate([np.zeros(2 - coeffs.size), coeffs])
        coeffs[-2] += c
        return replace(self, coeffs=tuple(coeffs))

    def shifted(self, dc):
        coeffs = np.asarray(self.coeffs, dtype=float).copy()
        coeffs[-1] += dc
        return replace(self, coeffs=tuple(coeffs))


class PiecewisePotential:
    """Contiguous convex pieces covering an interval of the line."""

    def __init__(self, pieces):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("empty potential")
        for left, right in zip(pieces, pieces[1:]):
            if not math.isclose(left.hi, right.lo, rel_tol=0.0, abs_tol=1e-9):
                raise ValueError(f"pieces not contiguous at {left.hi} vs {right.lo}")
        self.pieces = pieces
        self.lo = pieces[0].lo
        self.hi = pieces[-1].hi
        self._breaks = np.array([p.hi for p in pieces[:-1]])

    def _piece_index(self, x):
        return np.searchsorted(self._breaks, x, side="right")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.full(x.shape, np.inf)
        idx = self._piece_index(x)
        inside = (x >= self.lo) & (x <= self.hi)
        for j, piece in enumerate(self.pieces):
            m = inside & (idx == j)
            if np.any(m):
                out[m] = piece.value(x[m])
        return float(out[0]) if scalar else out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.full(x.shape, np.nan)
        idx = self._piece_index(x)
        inside = (x >= self.lo) & (x <= self.hi)
        for j, piece in enumerate(self.pieces):
            m = inside & (idx == j)
            if np.any(m):
                out[m] = piece.deriv(x[m])
        return float(out[0]) if scalar else out

    def tilted(self, c):
        """Add c*x to the potential."""
        return PiecewisePotential([p.tilted(c) for p in self.pieces])

    def shifted(self, dc):
        """Add a constant to the potential."""
        return PiecewisePotential([p.shifted(dc) for p in self.pieces])


# ---------------------------------------------------------------------------
# envelope construction

_KIND_EXP = 0
_KIND_GAUSS = 1


def _piece_min(piece, beta):
    """Location and value of the minimum of a convex piece."""
    lo, hi = piece.lo, piece.hi
    ref = 0.0
    if np.isfinite(lo):
        ref = lo
    elif np.isfinite(hi):
        ref = hi
    if isinstance(piece, LinearPiece):
        x = lo if piece.slope >= 0 else hi
        x = np.clip(x, -1e300, 1e300)
        return x, float(piece.value(x))
    if isinstance(piece, QuadraticPiece):
        x = min(max(piece.center, lo), hi)
        return x, float(piece.value(x))
    # power / poly: derivative is monotone; bisect for the zero if it changes sign
    a = lo if np.isfinite(lo) else ref - 1.0
    b = hi if np.isfinite(hi) else ref + 1.0
    if not np.isfinite(hi):
        while piece.deriv(b) < 0:
            b = ref + 2.0 * (b - ref) + 1.0
    if piece.deriv(a) >= 0:
        x = a
    elif piece.deriv(b) <= 0:
        x = b
    else:
        for _ in range(200):
            mid = 0.5 * (a + b)
            if piece.deriv(mid) < 0:
                a = mid
            else:
                b = mid
        x = 0.5 * (a + b)
    return x, float(piece.value(x))


def _clip_to_level(piece, xmin, vmin, level, side):
    """Point nearest xmin (going left or right) where the piece reaches level."""
    bound = piece.lo if side < 0 else piece.hi
    if np.isfinite(bound) and piece.value(bound) <= level:
        return float(bound)
    step = 1.0
    x = xmin + side * step
    for _ in range(400):
        if np.isfinite(bound):
            x = max(x, bound) if side < 0 else min(x, bound)
        if piece.value(x) >= level or (np.isfinite(bound) and x == bound):
            break
        step *= 2.0
        x = xmin + side * step
    a, b = (x, xmin) if side < 0 else (xmin, x)
    for _ in range(80):
        mid = 0.5 * (a + b)
        if piece.value(mid) >= level:
            if side < 0:
                a = mid
            else:
                b = mid
        else:
            if side < 0:
                b = mid
            else:
                a = mid
    return float(a if side < 0 else b)


def _tangent_envelope(piece, beta, gap_tol, max_anchors=96):
    """Tangent-line segments dominating exp(-beta*V) on a convex piece.

    Anchors are refined until the envelope gap (in beta*V units) is below
    gap_tol on the part of the piece within _MASS_CUTOFF e-foldings of the
    piece minimum; beyond that the envelope may be loose but carries no mass.
    """
    xmin, vmin = _piece_min(piece, beta)
    level = vmin + _MASS_CUTOFF / beta
    e_lo = piece.lo if np.isfinite(piece.lo) else _clip_to_level(piece, xmin, vmin, level, -1)
    e_hi = piece.hi if np.isfinite(piece.hi) else _clip_to_level(piece, xmin, vmin, level, +1)
    if np.isfinite(piece.lo):
        e_lo = max(e_lo, piece.lo)
    if np.isfinite(piece.hi):
        e_hi = min(e_hi, piece.hi)

    anchors = sorted({e_lo, e_hi} | ({xmin} if e_lo < xmin < e_hi else set()))
    if not np.isfinite(piece.hi) and piece.deriv(anchors[-1]) <= 0:
        raise NonNormalizableDensity("rightmost tangent slope must be positive")

    def gap_at(a1, a2):
        d1, d2 = float(piece.deriv(a1)), float(piece.deriv(a2))
        v1, v2 = float(piece.value(a1)), float(piece.value(a2))
        if d2 - d1 < 1e-14 * (abs(d1) + abs(d2) + 1.0):
            xs = 0.5 * (a1 + a2)
        else:
            xs = ((v2 - d2 * a2) - (v1 - d1 * a1)) / (d1 - d2)
            xs = min(max(xs, a1), a2)
        env = v1 + d1 * (xs - a1)
        gap = beta * (float(piece.value(xs)) - env)
        if gap < -1e-8 * (1.0 + abs(env) * beta):
            raise ValueError("tangent above the potential: piece is not convex")
        return xs, gap

    # adaptive refinement of the anchor list
    changed = True
    while changed and len(anchors) < max_anchors:
        changed = False
        new = []
        for a1, a2 in zip(anchors, anchors[1:]):
            xs, gap = gap_at(a1, a2)
            if gap > gap_tol and a2 - a1 > 1e-12 * (1.0 + abs(a1)):
                new.append(0.5 * (a1 + a2))
        if new:
            anchors = sorted(set(anchors) | set(new))
            changed = True

    # segment boundaries at tangent intersections, extended to the true piece
    segs = []
    derivs = [float(piece.deriv(a)) for a in anchors]
    values = [float(piece.value(a)) for a in anchors]
    bounds = [piece.lo]
    for j in range(len(anchors) - 1):
        d1, d2 = derivs[j], derivs[j + 1]
        if d2 - d1 < 1e-14 * (abs(d1) + abs(d2) + 1.0):
            xs = 0.5 * (anchors[j] + anchors[j + 1])
        else:
            xs = ((values[j + 1] - d2 * anchors[j + 1])
                  - (values[j] - d1 * anchors[j])) / (d1 - d2)
            xs = min(max(xs, anchors[j]), anchors[j + 1])
        bounds.append(xs)
    bounds.append(piece.hi)
    for j, a in enumerate(anchors):
        lo, hi = bounds[j], bounds[j + 1]
        if hi <= lo:
            continue
        segs.append((lo, hi, derivs[j], values[j] - derivs[j] * a))
    return segs


def _piece_log_mass(piece, beta):
    """log integral of exp(-beta*V) over a full piece (true potential)."""
    lo, hi = piece.lo, piece.hi
    if isinstance(piece, LinearPiece):
        return _exp_log_mass(beta, piece.slope, piece.offset, lo, hi)
    if isinstance(piece, QuadraticPiece):
        sigma = 1.0 / math.sqrt(beta * piece.curv)
        za = (lo - piece.center) / sigma if np.isfinite(lo) else -np.inf
        zb = (hi - piece.center) / sigma if np.isfinite(hi) else np.inf
        if not np.isfinite(za) and not np.isfinite(zb):
            ld = 0.0
        elif not np.isfinite(za):
            ld = float(special.log_ndtr(zb))
        elif not np.isfinite(zb):
            ld = float(special.log_ndtr(-za))
        else:
            ld = float(_log_ndtr_diff(np.array(za), np.array(zb))[0])
        return -beta * piece.offset + math.log(sigma) + 0.5 * math.log(2 * math.pi) + ld
    # power / poly: stabilized Gauss-Legendre on the mass-carrying range
    xmin, vmin = _piece_min(piece, beta)
    level = vmin + _MASS_CUTOFF / beta
    a = piece.lo if np.isfinite(piece.lo) else _clip_to_level(piece, xmin, vmin, level, -1)
    b = piece.hi if np.isfinite(piece.hi) else _clip_to_level(piece, xmin, vmin, level, +1)
    # geometric panels concentrated near the minimum
    edges = np.unique(np.concatenate([
        np.linspace(a, b, 33),
        xmin + (b - xmin) * np.linspace(0, 1, 17) ** 2 if b > xmin else [a],
        xmin - (xmin - a) * np.linspace(0, 1, 17) ** 2 if a < xmin else [b],
    ]))
    total = 0.0
    for p_lo, p_hi in zip(edges[:-1], edges[1:]):
        if p_hi <= p_lo:
            continue
        half = 0.5 * (p_hi - p_lo)
        xs = 0.5 * (p_lo + p_hi) + half * _GL_NODES
        total += half * float(np.sum(_GL_WEIGHTS * np.exp(-beta * (piece.value(xs) - vmin))))
    return -beta * vmin + math.log(total)


def _exp_log_mass(beta, slope, offset, a, b):
    """log integral_a^b exp(-beta*(slope*x + offset)) dx, scalar, stable."""
    if b <= a:
        return -np.inf
    if slope > 0:
        if not np.isfinite(a):
            raise NonNormalizableDensity("exp segment unbounded to the left")
        width = b - a
        t = beta * slope * width if np.isfinite(width) else np.inf
        tail = 0.0 if not np.isfinite(t) else float(log1mexp(np.array(t)))
        return -beta * (slope * a + offset) + tail - math.log(beta * slope)
    if slope < 0:
        if not np.isfinite(b):
            raise NonNormalizableDensity("exp segment unbounded to the right")
        width = b - a
        t = -beta * slope * width if np.isfinite(width) else np.inf
        tail = 0.0 if not np.isfinite(t) else float(log1mexp(np.array(t)))
        return -beta * (slope * b + offset) + tail - math.log(-beta * slope)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise NonNormalizableDensity("flat segment with unbounded domain")
    return -beta * offset + math.log(b - a)


class CompiledDensity:
    """Sampler for the normalized density exp(-beta*V)/Z of a piecewise potential.

    Compilation builds the dominating segment mixture once; sampling then
    selects a segment by its (window-restricted) exact mass, inverts the
    segment CDF, and accepts against the true potential.
    """

    def __init__(self, potential, beta, gap_tol=0.1):
        if beta <= 0:
            raise ValueError("beta must be positive")
        self.potential = potential
        self.beta = float(beta)
        first, last = potential.pieces[0], potential.pieces[-1]
        if not np.isfinite(first.lo):
            if isinstance(first, LinearPiece) and first.slope >= 0:
                raise NonNormalizableDensity(
                    "left tail slope must be negative for a normalizable density")
        if not np.isfinite(last.hi):
            if isinstance(last, LinearPiece) and last.slope <= 0:
                raise NonNormalizableDensity(
                    "right tail slope must be positive for a normalizable density")

        kinds, los, his, p0, p1, p2, exact = [], [], [], [], [], [], []
        for piece in potential.pieces:
            if isinstance(piece, LinearPiece):
                kinds.append(_KIND_EXP)
                los.append(piece.lo)
                his.append(piece.hi)
                p0.append(piece.slope)
                p1.append(piece.offset)
                p2.append(0.0)
                exact.append(True)
            elif isinstance(piece, QuadraticPiece):
                kinds.append(_KIND_GAUSS)
                los.append(piece.lo)
                his.append(piece.hi)
                p0.append(piece.curv)
                p1.append(piece.center)
                p2.append(piece.offset)
                exact.append(True)
            else:
                for s_lo, s_hi, slope, offset in _tangent_envelope(piece, self.beta, gap_tol):
                    kinds.append(_KIND_EXP)
                    los.append(s_lo)
                    his.append(s_hi)
                    p0.append(slope)
                    p1.append(offset)
                    p2.append(0.0)
                    exact.append(False)
        self._kind = np.array(kinds, dtype=np.int8)
        self._lo = np.array(los)
        self._hi = np.array(his)
        self._p0 = np.array(p0)
        self._p1 = np.array(p1)
        self._p2 = np.array(p2)
        self._exact = np.array(exact, dtype=bool)
        self._all_exact = bool(self._exact.all())
        self._global_logm = self._window_log_masses(
            np.array([-np.inf]), np.array([np.inf]))[0]
        if not np.any(np.isfinite(self._global_logm)):
            raise NonNormalizableDensity("potential carries no finite mass")
        self._log_partition = None

    # -- masses ------------------------------------------------------------

    def _window_log_masses(self, lo, hi):
        """(S, L) log envelope masses of each segment restricted to [lo, hi]."""
        beta = self.beta
        out = np.full((lo.size, self._lo.size), -np.inf)
        for l in range(self._lo.size):
            a = np.maximum(lo, self._lo[l])
            b = np.minimum(hi, self._hi[l])
            valid = b > a
            if not np.any(valid):
                continue
            av, bv = a[valid], b[valid]
            if self._kind[l] == _KIND_EXP:
                s, c = self._p0[l], self._p1[l]
                if s > 0:
                    tail = log1mexp(beta * s * (bv - av))
                    res = -beta * (s * av + c) + tail - math.log(beta * s)
                elif s < 0:
                    tail = log1mexp(-beta * s * (bv - av))
                    res = -beta * (s * bv + c) + tail - math.log(-beta * s)
                else:
                    res = -beta * c + np.log(bv - av)
            else:
                curv, center, c = self._p0[l], self._p1[l], self._p2[l]
                sigma = 1.0 / math.sqrt(beta * curv)
                za = (av - center) / sigma
                zb = (bv - center) / sigma
                ld = _log_ndtr_diff(np.where(np.isfinite(za), za, -600.0),
                                    np.where(np.isfinite(zb), zb, 600.0))
                res = (-beta * c + math.log(sigma)
                       + 0.5 * math.log(2 * math.pi) + ld)
            out[valid, l] = res
        return out

    def log_partition(self):
        """log of the true normalizing integral (closed forms; quadrature on
        power/poly pieces)."""
        if self._log_partition is None:
            logs = np.array([_piece_log_mass(p, self.beta) for p in self.potential.pieces])
            m = logs.max()
            self._log_partition = float(m + np.log(np.sum(np.exp(logs - m))))
        return self._log_partition

    # -- sampling ----------------------------------------------------------

    def _segment_draw(self, rng, seg_idx, lo, hi):
        """One value per row from segment seg_idx truncated to [lo, hi]."""
        beta = self.beta
        out = np.empty(seg_idx.shape)
        u = rng.random(seg_idx.shape)
        for l in np.unique(seg_idx):
            rows = seg_idx == l
            a = np.maximum(lo[rows], self._lo[l])
            b = np.minimum(hi[rows], self._hi[l])
            uu = u[rows]
            if self._kind[l] == _KIND_EXP:
                s = self._p0[l]
                if s > 0:
                    rate = beta * s
                    cap = -np.expm1(-rate * np.where(np.isfinite(b - a), b - a, 1.0))
                    cap = np.where(np.isfinite(b - a), cap, 1.0)
                    x = a - np.log1p(-uu * cap) / rate
                elif s < 0:
                    rate = -beta * s
                    cap = -np.expm1(-rate * np.where(np.isfinite(b - a), b - a, 1.0))
                    cap = np.where(np.isfinite(b - a), cap, 1.0)
                    x = b + np.log1p(-uu * cap) / rate
                else:
                    x = a + uu * (b - a)
            else:
                curv, center = self._p0[l], self._p1[l]
                sigma = 1.0 / math.sqrt(beta * curv)
                za = (a - center) / sigma
                zb = (b - center) / sigma
                both = np.isfinite(za) & np.isfinite(zb)
                mid = np.where(np.isfinite(za), za, 0.0) + np.where(np.isfinite(zb), zb, 0.0)
                flip = np.where(both, mid > 0, np.isfinite(za) & (za > 0))
                z1 = np.where(flip, -zb, za)
                z2 = np.where(flip, -za, zb)
                fin1 = np.isfinite(z1)
                l1 = np.where(fin1, special.log_ndtr(np.where(fin1, z1, 0.0)), -np.inf)
                l2 = special.log_ndtr(np.where(np.isfinite(z2), z2, 600.0))
                ldiff = np.where(fin1, l2 + log1mexp(np.maximum(l2 - l1, 1e-300)), l2)
                target = np.logaddexp(np.where(fin1, l1, -np.inf), np.log(uu) + ldiff)
                z = special.ndtri_exp(target)
                x = center + sigma * np.where(flip, -z, z)
            out[rows] = np.clip(x, a, b)
        return out

    def _envelope_value(self, seg_idx, x):
        kind = self._kind[seg_idx]
        out = np.empty(x.shape)
        em = kind == _KIND_EXP
        if np.any(em):
            out[em] = self._p0[seg_idx[em]] * x[em] + self._p1[seg_idx[em]]
        gm = ~em
        if np.any(gm):
            d = x[gm] - self._p1[seg_idx[gm]]
            out[gm] = 0.5 * self._p0[seg_idx[gm]] * d * d + self._p2[seg_idx[gm]]
        return out

    def _rejection_loop(self, rng, rows, pick_segments, lo, hi, max_rounds=500):
        out = np.empty(rows)
        pending = np.arange(rows)
        for _ in range(max_rounds):
            seg = pick_segments(rng, pending)
            x = self._segment_draw(rng, seg, lo[pending], hi[pending])
            if self._all_exact:
                out[pending] = x
                return out
            exact = self._exact[seg]
            slack = np.zeros(x.shape)
            if not np.all(exact):
                ne = ~exact
                slack[ne] = -self.beta * (self.potential(x[ne])
                                          - self._envelope_value(seg[ne], x[ne]))
            ok = exact | (np.log(rng.random(pending.size)) < slack)
            out[pending[ok]] = x[ok]
            pending = pending[~ok]
            if pending.size == 0:
                return out
        raise RuntimeError("envelope rejection failed to converge")

    def sample(self, rng, size):
        """``size`` i.i.d. draws from the full density."""
        logm = self._global_logm
        shift = logm.max()
        cdf = np.cumsum(np.exp(logm - shift))
        last = len(cdf) - 1

        def pick(rng_, pending):
            u = rng_.random(pending.size)
            return np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), last)

        lo = np.full(size, -np.inf)
        hi = np.full(size, np.inf)
        return self._rejection_loop(rng, size, pick, lo, hi)

    def sample_truncated(self, rng, lo, hi):
        """One draw per row from the density restricted to [lo[i], hi[i]]."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        logm = self._window_log_masses(lo, hi)
        shift = logm.max(axis=1)
        if not np.all(np.isfinite(shift)):
            raise ValueError("a truncation window carries no mass")
        cdf = np.cumsum(np.exp(logm - shift[:, None]), axis=1)

        def pick(rng_, pending):
            u = rng_.random(pending.size)
            c = cdf[pending]
            return (c > u[:, None] * c[:, -1][:, None]).argmax(axis=1)

        return self._rejection_loop(rng, lo.size, pick, lo, hi)


def log_partition(potential, beta):
    """log integral of exp(-beta*V) for a piecewise potential."""
    return CompiledDensity(potential, beta).log_partition()
