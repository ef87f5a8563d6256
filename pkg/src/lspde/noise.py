"""Levy white noise: symbol, characteristic functional, grid sampling, and the
existence-condition checkers (weight functions and admissibility integrals).

The sampler realizes each cell integral as an independent draw of the
infinitely divisible law with characteristic function exp(h^d psi(z)):
jumps of size at most delta are folded into the Gaussian part with their exact
variance, larger jumps form a compound Poisson mixture over the measure's
components, and the drift is corrected by the compensator mass between delta
and 1 so that sampled and analytic characteristic functions agree without
re-centering.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import defaults
from .errors import DivergentIntegral, InvalidDelta, Unbounded
from .fields import PHYSICAL, Field
from .measures import LevyMeasure
from .quadrature import integrate_positive

# ---------------------------------------------------------------------- #
# weight functions
# ---------------------------------------------------------------------- #


class WeightFunction:
    """Radial weight omega(x) = sigma(||x||) with an increasing concave sigma.

    Built-in profiles have closed-form generalized inverses; custom profiles
    fall back to bracketed bisection. Admissibility checks (finite integral of
    sigma(t)/(1+t^2), logarithmic lower bound) run at construction for custom
    profiles and are recorded as flags rather than refusing construction,
    since the generalized inverse is well defined for any increasing sigma.
    """

    def __init__(self, kind, sigma, params=None, *, admissibility=None):
        self.kind = kind
        self._sigma = sigma
        self.params = dict(params or {})
        self.admissibility = admissibility if admissibility is not None else {}

    @classmethod
    def log_power(cls, m):
        if not m > 0:
            raise ValueError("m must be positive")
        return cls("log-power", lambda t: m * np.log1p(t), {"m": float(m)})

    @classmethod
    def power(cls, beta):
        if not 0 < beta < 1:
            raise ValueError("exponent must lie in (0, 1)")
        return cls("power", lambda t: np.asarray(t, dtype=float) ** beta, {"beta": float(beta)})

    @classmethod
    def custom(cls, sigma):
        sig = lambda t: np.asarray(sigma(np.asarray(t, dtype=float)), dtype=float)
        at_zero = float(sig(np.array([0.0]))[0])
        if abs(at_zero) > 1e-12:
            raise ValueError("sigma(0) must be 0")
        grid = np.concatenate([[0.0], np.logspace(-3, 6, 200)])
        vals = sig(grid)
        if np.any(np.diff(vals) < -1e-12 * (1.0 + np.abs(vals[:-1]))):
            raise ValueError("sigma must be nondecreasing")
        integral, ok = integrate_positive(lambda t: sig(t) / (1.0 + t * t), 0.0, math.inf)
        big = grid[grid >= 10.0]
        m_hat = float(np.min(sig(big) / np.log1p(big)))
        admissibility = {
            "integral_finite": bool(ok and math.isfinite(integral)),
            "integral_value": float(integral) if ok else math.inf,
            "log_bound_constant": m_hat,
            "log_bound_ok": m_hat > 0.0,
        }
        if not (admissibility["integral_finite"] and admissibility["log_bound_ok"]):
            warnings.warn(
                "custom weight fails an admissibility check "
                f"({admissibility}); inverse remains well defined",
                UserWarning,
                stacklevel=2,
            )
        return cls("custom", sig, {}, admissibility=admissibility)

    def sigma(self, t):
        return np.asarray(self._sigma(np.asarray(t, dtype=float)), dtype=float)

    def omega(self, x):
        x = np.asarray(x, dtype=float)
        return self.sigma(np.sqrt(np.sum(x * x, axis=-1)))

    def inverse(self, alpha):
        """Generalized inverse: sup of radii where the weight stays below alpha."""
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        if self.kind == "log-power":
            return math.expm1(alpha / self.params["m"])
        if self.kind == "power":
            return alpha ** (1.0 / self.params["beta"])
        return self._inverse_bisect(alpha)

    def _inverse_bisect(self, alpha, tol=defaults.BISECT_TOL):
        hi = 1.0
        while float(self.sigma(np.array([hi]))[0]) < alpha:
            hi *= 2.0
            if hi > 1e300:
                raise Unbounded(f"weight stays below {alpha} out to {hi:.3g}")
        lo = 0.0 if hi == 1.0 else hi / 2.0
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if float(self.sigma(np.array([mid]))[0]) < alpha:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def inverse_array(self, alphas):
        alphas = np.asarray(alphas, dtype=float)
        if np.any(alphas <= 0):
            raise ValueError("alpha values must be positive")
        if self.kind == "log-power":
            return np.expm1(alphas / self.params["m"])
        if self.kind == "power":
            return alphas ** (1.0 / self.params["beta"])
        return np.array([self._inverse_bisect(a) for a in alphas.ravel()]).reshape(alphas.shape)


# ---------------------------------------------------------------------- #
# triplet and symbol
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class LevyTriplet:
    """Characteristic triplet: Gaussian variance, drift, and jump measure."""

    gaussian_variance: float
    drift: float
    jumps: LevyMeasure

    def __post_init__(self):
        if not self.gaussian_variance >= 0:
            raise ValueError("gaussian variance must be nonnegative")

    @classmethod
    def gaussian(cls, variance=1.0, drift=0.0):
        return cls(variance, drift, LevyMeasure.zero())

    def to_config(self):
        return {
            "gaussian_variance": self.gaussian_variance,
            "drift": self.drift,
            "measure": self.jumps.to_config(),
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(
            float(cfg.get("gaussian_variance", 0.0)),
            float(cfg.get("drift", 0.0)),
            LevyMeasure.from_config(cfg.get("measure", [])),
        )


def _compensated_term(x, z):
    # e^{ixz} - 1 - ixz, with the real part in cancellation-free form
    xz = x * z
    return -2.0 * np.sin(0.5 * xz) ** 2 + 1j * (np.sin(xz) - xz)


def _raw_term(x, z):
    xz = x * z
    return (np.cos(xz) - 1.0) + 1j * np.sin(xz)


def levy_symbol(triplet, z):
    """Characteristic exponent psi(z) = i*drift*z - a z^2/2 + jump integral.

    Jumps of size at most 1 enter compensated, larger ones raw; accepts a
    scalar or an array of real arguments.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    out = (1j * triplet.drift) * z_arr - 0.5 * triplet.gaussian_variance * z_arr**2
    out = out.astype(np.complex128)
    nu = triplet.jumps
    if nu.atoms and not nu.densities:
        locs = np.array([loc for loc, _ in nu.atoms])
        ws = np.array([w for _, w in nu.atoms])
        xz = z_arr[:, None] * locs[None, :]
        comp = (np.abs(locs) <= 1.0).astype(float)
        terms = np.exp(1j * xz) - 1.0 - 1j * xz * comp[None, :]
        out += terms @ ws
    elif not nu.is_zero:
        for i, zz in enumerate(z_arr):
            if zz == 0.0:
                continue
            width = 4.0 / abs(zz)
            small = nu.integral(
                lambda x: _compensated_term(x, zz),
                0.0,
                1.0,
                max_width=width,
                on_divergence=DivergentIntegral,
            )
            large = nu.integral(
                lambda x: _raw_term(x, zz),
                1.0,
                math.inf,
                max_width=width,
                on_divergence=DivergentIntegral,
            )
            out[i] += small + large
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(out[0])
    return out


def characteristic_functional(triplet, phi):
    """exp of the Riemann sum of psi(phi(x)) over the grid cells."""
    if phi.domain != PHYSICAL:
        raise ValueError("test function must be a physical field")
    if phi.max_imag > 1e-9:
        raise ValueError("test function must be real-valued")
    vals = phi.values.real.ravel()
    psi = levy_symbol(triplet, vals)
    return complex(np.exp(np.sum(psi) * phi.grid.cell_volume))


# ---------------------------------------------------------------------- #
# sampling
# ---------------------------------------------------------------------- #


@dataclass
class NoiseRealization:
    """Cell integrals of a white-noise realization on a grid.

    The pairing with a test function phi is the sum of phi at cell centers
    times the cell integrals; ``density_field`` divides by the cell volume so
    that the same pairing becomes the plain discrete L^2 inner product.
    """

    grid: object
    cell_integrals: np.ndarray
    seed: int
    triplet: LevyTriplet
    delta: float

    def __post_init__(self):
        self.cell_integrals = np.ascontiguousarray(self.cell_integrals, dtype=float)
        if self.cell_integrals.shape != self.grid.shape:
            raise ValueError("cell integral array does not match the grid")

    def density_field(self):
        return Field(self.grid, self.cell_integrals / self.grid.cell_volume, PHYSICAL)

    def pair(self, phi):
        if phi.domain != PHYSICAL:
            raise ValueError("pairing requires a physical test function")
        return float(np.sum(phi.values.real * self.cell_integrals))

    def shifted(self, shift):
        shift = tuple(int(s) for s in shift)
        return NoiseRealization(
            self.grid,
            np.roll(self.cell_integrals, shift, axis=tuple(range(self.grid.dim))),
            self.seed,
            self.triplet,
            self.delta,
        )

    def to_field(self):
        meta = {
            "kind": "noise-cells",
            "triplet": self.triplet.to_config(),
            "delta": self.delta,
            "seed": int(self.seed),
        }
        return Field(self.grid, self.cell_integrals.astype(np.complex128), PHYSICAL, meta=meta)

    @classmethod
    def from_field(cls, field):
        meta = field.meta or {}
        if meta.get("kind") != "noise-cells":
            raise ValueError("field file does not hold a noise realization")
        return cls(
            field.grid,
            field.values.real,
            int(meta["seed"]),
            LevyTriplet.from_config(meta["triplet"]),
            float(meta["delta"]),
        )


class LevyNoiseSampler:
    """Reusable sampler for one (triplet, grid, delta); draws are seed-addressed.

    Replicates should use seeds ``base_seed + i`` (the documented splitting
    rule); identical seeds reproduce cell integrals bit for bit.
    """

    def __init__(self, triplet, grid, delta=defaults.DELTA):
        if not 0 < delta <= 1:
            raise InvalidDelta(f"truncation level must lie in (0, 1], got {delta}")
        self.triplet = triplet
        self.grid = grid
        self.delta = float(delta)
        nu = triplet.jumps
        hd = grid.cell_volume
        if nu.is_zero:
            small_var, comp_mean = 0.0, 0.0
        else:
            small_var = nu.small_jump_variance(delta)
            _, comp_mean = nu.tail_mass_and_compensator(delta)
        self.gauss_mean = hd * (triplet.drift - comp_mean)
        self.gauss_std = math.sqrt(hd * (triplet.gaussian_variance + small_var))
        self._components = []
        weights = []
        for loc, w in nu.atoms:
            if abs(loc) > delta:
                self._components.append(("atom", loc))
                weights.append(w)
        for piece in nu.densities:
            mass = piece.mass_between(delta, math.inf)
            if mass > 0:
                self._components.append(("piece", piece))
                weights.append(mass)
        total = float(sum(weights))
        self.intensity = hd * total
        self._mix = np.array(weights) / total if total > 0 else np.array([])

    def sample(self, seed):
        rng = np.random.default_rng(seed)
        n = self.grid.size
        cells = rng.normal(self.gauss_mean, self.gauss_std, size=n)
        if self.intensity > 0:
            counts = rng.poisson(self.intensity, size=n)
            total = int(counts.sum())
            if total:
                comp_idx = rng.choice(len(self._components), size=total, p=self._mix)
                jumps = np.empty(total)
                for i, (kind, obj) in enumerate(self._components):
                    sel = comp_idx == i
                    k = int(np.count_nonzero(sel))
                    if k == 0:
                        continue
                    if kind == "atom":
                        jumps[sel] = obj
                    else:
                        us = rng.random(k)
                        try:
                            jumps[sel] = obj.sample_between(self.delta, math.inf, us)
                        except (TypeError, ValueError):
                            jumps[sel] = [
                                obj.sample_between(self.delta, math.inf, u) for u in us
                            ]
                cell_idx = np.repeat(np.arange(n), counts)
                cells = cells + np.bincount(cell_idx, weights=jumps, minlength=n)
        return NoiseRealization(
            self.grid, cells.reshape(self.grid.shape), int(seed), self.triplet, self.delta
        )


def sample_noise(triplet, grid, delta, rng_seed):
    """One-shot draw; see LevyNoiseSampler for replicate loops."""
    return LevyNoiseSampler(triplet, grid, delta).sample(rng_seed)


# ---------------------------------------------------------------------- #
# existence conditions
# ---------------------------------------------------------------------- #


def ultra_admissibility(nu, weight, c, d):
    """Double integral deciding noise existence on the exponential-weight dual.

    Evaluates the tail integral of |r| times the inner integral over
    alpha in (0, 1/|r|) of inverse-weight(c log(1/alpha))^d; returns math.inf
    when either layer diverges. Finiteness licenses a noise with this jump
    measure on the weighted dual space.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError("d must be a positive integer")
    if nu.is_zero:
        return 0.0

    def level_size(alphas):
        return weight.inverse_array(c * np.log(1.0 / np.asarray(alphas, dtype=float))) ** d

    def inner(radius):
        val, ok = integrate_positive(level_size, 0.0, 1.0 / radius)
        return float(val) if ok and math.isfinite(val) else math.inf

    def outer_integrand(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        return np.array([abs(x) * inner(abs(x)) for x in xs])

    return float(nu.integral(outer_integrand, 1.0, math.inf))


@dataclass(frozen=True)
class ExpDecayProfile:
    """Radial profile amplitude * exp(-rate * ||x||) with a closed-form
    distribution function."""

    amplitude: float
    rate: float
    dim: int

    def __post_init__(self):
        if not (self.amplitude > 0 and self.rate > 0 and self.dim >= 1):
            raise ValueError("need positive amplitude/rate and dim >= 1")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(-self.rate * np.sqrt(np.sum(x * x, axis=-1)))


def unit_ball_volume(d):
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def distribution_function(f, alpha):
    """Lebesgue measure of the superlevel set {|f| > alpha}.

    Fields are measured by counting cells; the exponential profile has the
    exact closed form vol(unit ball) * (log(amplitude/alpha)/rate)^d.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if isinstance(f, Field):
        if f.domain != PHYSICAL:
            raise ValueError("distribution function is defined for physical fields")
        count = int(np.count_nonzero(np.abs(f.values) > alpha))
        return count * f.grid.cell_volume
    if isinstance(f, ExpDecayProfile):
        if alpha >= f.amplitude:
            return 0.0
        if alpha == 0.0:
            return math.inf
        radius = math.log(f.amplitude / alpha) / f.rate
        return unit_ball_volume(f.dim) * radius**f.dim
    raise TypeError("expected a Field or an ExpDecayProfile")
