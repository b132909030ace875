"""Background charge measures and the Coulomb quantities they generate.

A background is a probability density rho carrying total charge alpha. The
quantity most of the package runs on is phi(x) = alpha * integral |x-y|/2
drho(y), the negated Coulomb potential of the charged background: it is
convex, has second derivative alpha*rho, and is affine with slopes -/+
alpha/2 outside the support. Each variant assembles phi in closed form as a
piecewise potential, so downstream sampling never needs quadrature across
density kinks or singularities.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .exceptions import NonIntegrableBackground
from .piecewise import (LinearPiece, PiecewisePotential, PolyPiece, PowerPiece,
                        QuadraticPiece)


@dataclass(frozen=True)
class UniformInterval:
    """Uniform probability density on [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise NonIntegrableBackground("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError("need a < b")


@dataclass(frozen=True)
class GammaFamily:
    """Flat density on [-(alpha+n)/2, 0] plus a (gamma-1)x^(gamma-2) right
    wing on [0, ((alpha-n)/2)^(1/(gamma-1))], total charge alpha.

    The wing exponent interpolates the decay of the background at its right
    edge; gamma in (1,2) puts an integrable singularity at 0.
    """

    n: int
    gamma: float

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError("need gamma > 1")
        if self.n < 1:
            raise ValueError("need n >= 1")


@dataclass(frozen=True)
class FixedDensity:
    """Piecewise-linear probability density on knots inside (-inf, 0]."""

    knots: tuple  # ((x0, d0), ..., (xJ, dJ)), x ascending, xJ <= 0, d >= 0

    def __post_init__(self):
        knots = tuple((float(x), float(d)) for x, d in self.knots)
        object.__setattr__(self, "knots", knots)
        xs = np.array([x for x, _ in knots])
        ds = np.array([d for _, d in knots])
        if xs.size < 2:
            raise ValueError("need at least two knots")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ds)):
            raise NonIntegrableBackground("knots must be finite")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("knot positions must be strictly increasing")
        if xs[-1] > 0.0:
            raise ValueError("support must lie inside (-inf, 0]")
        if np.any(ds < 0):
            raise ValueError("density must be nonnegative")
        mass = float(np.sum(0.5 * (ds[1:] + ds[:-1]) * np.diff(xs)))
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {mass!r}, not 1")

    @classmethod
    def normalized(cls, knots):
        """Rescale knot densities so the total mass is exactly one."""
        xs = np.array([x for x, _ in knots], dtype=float)
        ds = np.array([d for _, d in knots], dtype=float)
        mass = float(np.sum(0.5 * (ds[1:] + ds[:-1]) * np.diff(xs)))
        return cls(tuple(zip(xs, ds / mass)))


class ClosedFormTag(enum.Enum):
    UNIFORM_CLOSED = "UniformClosed"
    GAMMA_CLOSED = "GammaClosed"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class BackgroundSpec:
    """A background variant scaled to total charge alpha > 0."""

    variant: object
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("total charge alpha must be positive")
        if isinstance(self.variant, GammaFamily) and self.alpha < self.variant.n:
            raise ValueError("gamma family needs alpha >= n to be a positive measure")

    # -- geometry ----------------------------------------------------------

    def support(self):
        v = self.variant
        if isinstance(v, UniformInterval):
            return v.a, v.b
        if isinstance(v, GammaFamily):
            left = -(self.alpha + v.n) / 2.0
            right = ((self.alpha - v.n) / 2.0) ** (1.0 / (v.gamma - 1.0)) \
                if self.alpha > v.n else 0.0
            return left, right
        return v.knots[0][0], v.knots[-1][0]

    def mean(self):
        """First moment of the probability density."""
        v = self.variant
        if isinstance(v, UniformInterval):
            return 0.5 * (v.a + v.b)
        if isinstance(v, GammaFamily):
            left, right = self.support()
            flat = -left * left / 2.0
            wing = (v.gamma - 1.0) / v.gamma * right ** v.gamma
            return (flat + wing) / self.alpha
        total = 0.0
        for (x0, d0), (x1, d1) in zip(v.knots, v.knots[1:]):
            # integral of y*(linear density) over [x0, x1]
            c = d0 - (d1 - d0) / (x1 - x0) * x0
            e = (d1 - d0) / (x1 - x0)
            total += c * (x1**2 - x0**2) / 2.0 + e * (x1**3 - x0**3) / 3.0
        return total

    def prob_cdf(self, x):
        """CDF of the probability density, vectorized."""
        v = self.variant
        x = np.asarray(x, dtype=float)
        if isinstance(v, UniformInterval):
            return np.clip((x - v.a) / (v.b - v.a), 0.0, 1.0)
        if isinstance(v, GammaFamily):
            left, right = self.support()
            flat = np.clip(x - left, 0.0, -left)
            wing = np.power(np.clip(x, 0.0, right), v.gamma - 1.0)
            return (flat + wing) / self.alpha
        xs = np.array([p for p, _ in v.knots])
        ds = np.array([d for _, d in v.knots])
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (ds[1:] + ds[:-1]) * np.diff(xs))])
        idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        x0, x1 = xs[idx], xs[idx + 1]
        d0, d1 = ds[idx], ds[idx + 1]
        t = np.clip((x - x0) / (x1 - x0), 0.0, 1.0)
        local = (x1 - x0) * (d0 * t + 0.5 * (d1 - d0) * t * t)
        out = cum[idx] + local
        return np.clip(np.where(x <= xs[0], 0.0, np.where(x >= xs[-1], 1.0, out)), 0.0, 1.0)

    def dilate(self, sigma):
        """Pushforward of the background under x -> sigma*x, same charge."""
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        v = self.variant
        if isinstance(v, UniformInterval):
            return BackgroundSpec(UniformInterval(sigma * v.a, sigma * v.b), self.alpha)
        if isinstance(v, FixedDensity):
            knots = tuple((sigma * x, d / sigma) for x, d in v.knots)
            return BackgroundSpec(FixedDensity(knots), self.alpha)
        raise ValueError("the gamma family is not closed under dilation")

    # -- potential ---------------------------------------------------------

    def phi_pieces(self):
        """phi(x) = alpha * integral |x-y|/2 drho(y) as a piecewise potential."""
        return _phi_pieces(self)

    def closed_form_tag(self):
        if isinstance(self.variant, UniformInterval):
            return ClosedFormTag.UNIFORM_CLOSED
        if isinstance(self.variant, GammaFamily):
            return ClosedFormTag.GAMMA_CLOSED
        return ClosedFormTag.QUADRATURE

    # -- serialization -----------------------------------------------------

    def to_json(self):
        v = self.variant
        if isinstance(v, UniformInterval):
            return {"variant": "uniform_interval", "alpha": self.alpha,
                    "params": {"a": v.a, "b": v.b}}
        if isinstance(v, GammaFamily):
            return {"variant": "gamma_family", "alpha": self.alpha,
                    "params": {"n": v.n, "gamma": v.gamma}}
        return {"variant": "fixed_density", "alpha": self.alpha,
                "params": {"knots": [list(k) for k in v.knots]}}

    @classmethod
    def from_json(cls, obj):
        variant = obj["variant"]
        params = obj["params"]
        if variant == "uniform_interval":
            return cls(UniformInterval(params["a"], params["b"]), obj["alpha"])
        if variant == "gamma_family":
            return cls(GammaFamily(int(params["n"]), params["gamma"]), obj["alpha"])
        if variant == "fixed_density":
            return cls(FixedDensity(tuple((x, d) for x, d in params["knots"])),
                       obj["alpha"])
        raise ValueError(f"unknown background variant {variant!r}")


@lru_cache(maxsize=256)
def _phi_pieces(bg: BackgroundSpec) -> PiecewisePotential:
    alpha = bg.alpha
    v = bg.variant
    if isinstance(v, UniformInterval):
        a, b, w = v.a, v.b, v.b - v.a
        m = 0.5 * (a + b)
        return PiecewisePotential([
            LinearPiece(-np.inf, a, -alpha / 2.0, alpha * m / 2.0),
            QuadraticPiece(a, b, alpha / w, m, alpha * w / 8.0),
            LinearPiece(b, np.inf, alpha / 2.0, -alpha * m / 2.0),
        ])
    if isinstance(v, GammaFamily):
        left, right = bg.support()
        n = float(v.n)
        phi0 = left * left / 4.0 + (v.gamma - 1.0) / (2.0 * v.gamma) * right ** v.gamma
        pieces = [LinearPiece(-np.inf, left,
                              -alpha / 2.0,
                              (left * left / 2.0 + n * left / 2.0 + phi0)
                              + alpha * left / 2.0),
                  QuadraticPiece(left, 0.0, 1.0, -n / 2.0, phi0 - n * n / 8.0)]
        if right > 0.0:
            pieces.append(PowerPiece(0.0, right, v.gamma, n / 2.0, phi0))
            phi_r = right ** v.gamma / v.gamma + n * right / 2.0 + phi0
        else:
            phi_r = phi0
        pieces.append(LinearPiece(right, np.inf, alpha / 2.0,
                                  phi_r - alpha * right / 2.0))
        return PiecewisePotential(pieces)
    # fixed density: phi'' = alpha * rho, integrated twice across the knots
    xs = np.array([p for p, _ in v.knots])
    mu = bg.mean()
    pieces = [LinearPiece(-np.inf, xs[0], -alpha / 2.0, alpha * mu / 2.0)]
    val = alpha * (mu - xs[0]) / 2.0
    slope = -alpha / 2.0
    for (x0, d0), (x1, d1) in zip(v.knots, v.knots[1:]):
        e = (d1 - d0) / (x1 - x0)
        c = d0 - e * x0
        # phi = alpha*(e x^3/6 + c x^2/2) + A x + B on [x0, x1]
        a3 = alpha * e / 6.0
        a2 = alpha * c / 2.0
        a_lin = slope - (3 * a3 * x0 * x0 + 2 * a2 * x0)
        a0 = val - (a3 * x0**3 + a2 * x0**2 + a_lin * x0)
        pieces.append(PolyPiece(x0, x1, (a3, a2, a_lin, a0)))
        val = a3 * x1**3 + a2 * x1**2 + a_lin * x1 + a0
        slope = 3 * a3 * x1 * x1 + 2 * a2 * x1 + a_lin
    pieces.append(LinearPiece(xs[-1], np.inf, alpha / 2.0, val - alpha * xs[-1] / 2.0))
    return PiecewisePotential(pieces)


def minus_potential(bg: BackgroundSpec, x):
    """-alpha*U_rho(x) = alpha * integral |x-y|/2 drho(y), vectorized in x."""
    return bg.phi_pieces()(x)


def electric_field(bg: BackgroundSpec, x):
    """(alpha/2) * integral sign(x-y) drho(y); equals d/dx of minus_potential."""
    return bg.phi_pieces().deriv(x)


def self_energy(bg: BackgroundSpec):
    """Coulomb self-energy -1/4 * double integral |x-y| drho drho, per unit charge.

    Uses E|X-Y| = 2 * integral F(1-F) for i.i.d. X, Y with CDF F, reducing the
    double integral to a one-dimensional one over the support.
    """
    v = bg.variant
    if isinstance(v, UniformInterval):
        return -(v.b - v.a) / 12.0
    lo, hi = bg.support()
    breaks = [lo, hi]
    if isinstance(v, GammaFamily):
        breaks.insert(1, 0.0)
    else:
        breaks = [x for x, _ in v.knots]
    total = 0.0
    for a, b in zip(breaks, breaks[1:]):
        if b <= a:
            continue
        val, _ = integrate.quad(lambda t: bg.prob_cdf(t) * (1.0 - bg.prob_cdf(t)),
                                a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    mean_abs_diff = 2.0 * total
    return -0.25 * mean_abs_diff


@dataclass(frozen=True)
class Potential1D:
    """Convex confining potential with a tag recording how it was assembled."""

    pieces: PiecewisePotential
    closed_form_tag: ClosedFormTag

    def __call__(self, x):
        return self.pieces(x)

    def deriv(self, x):
        return self.pieces.deriv(x)


def per_particle_potential(bg: BackgroundSpec, params, i: int) -> Potential1D:
    """Confining potential of the i-th order statistic (i=1 is the right-most):
    ((2i-1-n)/2)*x + minus_potential(x)."""
    n = params.n
    if not 1 <= i <= n:
        raise IndexError(f"order-statistic index {i} outside 1..{n}")
    tilt = (2.0 * i - 1.0 - n) / 2.0
    return Potential1D(bg.phi_pieces().tilted(tilt), bg.closed_form_tag())
