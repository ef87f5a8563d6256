"""Real multivariate polynomials, the rational symbol q(i xi)/p(i xi), and
numerical estimation of its power-decay order.

A polynomial is a finite map from multi-indices alpha to real coefficients,
evaluated at i*xi via (i xi)^alpha = prod_j (i xi_j)^(alpha_j). Zero detection
on the frequency lattice is grid-based: the continuum hypotheses (holomorphy
on a strip, no zeros there) have no finite certificate, so the solvers only
require a nonvanishing denominator at the frequencies they touch, with the
threshold |p(i xi)| >= scale * (1 + sum |coeffs|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import defaults
from .errors import DimensionMismatch, FitFailed, ZeroOnAxis


class MultiPoly:
    """Finitely supported real polynomial in d variables."""

    def __init__(self, terms, dim):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        clean = {}
        for alpha, coeff in dict(terms).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim:
                raise DimensionMismatch(
                    f"multi-index {alpha} has length {len(alpha)}, dimension is {self.dim}"
                )
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative entry in multi-index {alpha}")
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            if coeff != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + coeff
        self.terms = {a: c for a, c in clean.items() if c != 0.0}

    def __repr__(self):
        return f"MultiPoly({self.terms!r}, dim={self.dim})"

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly) and other.dim == self.dim and other.terms == self.terms
        )

    @classmethod
    def constant(cls, c, dim):
        return cls({(0,) * dim: c}, dim)

    @classmethod
    def from_config(cls, entries, dim=None):
        """Config syntax: list of {"alpha": [a1..ad], "coeff": value}."""
        entries = list(entries)
        if dim is None:
            if not entries:
                raise ValueError("cannot infer dimension from an empty term list")
            dim = len(entries[0]["alpha"])
        terms = {}
        for e in entries:
            alpha = tuple(int(a) for a in e["alpha"])
            terms[alpha] = terms.get(alpha, 0.0) + float(e["coeff"])
        return cls(terms, dim)

    def to_config(self):
        return [
            {"alpha": list(alpha), "coeff": coeff}
            for alpha, coeff in sorted(self.terms.items())
        ]

    @classmethod
    def helmholtz(cls, lam, order, dim):
        """(lam - sum_j z_j^2)^order, whose symbol at i*xi is (lam + ||xi||^2)^order."""
        base = cls.constant(lam, dim)
        for j in range(dim):
            alpha = tuple(2 if k == j else 0 for k in range(dim))
            base = base + cls({alpha: -1.0}, dim)
        return base**order

    @property
    def is_zero(self):
        return not self.terms

    @property
    def coeff_l1(self):
        return sum(abs(c) for c in self.terms.values())

    @property
    def degree(self):
        return max((sum(a) for a in self.terms), default=0)

    def __add__(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("polynomial dimensions differ")
        terms = dict(self.terms)
        for alpha, coeff in other.terms.items():
            terms[alpha] = terms.get(alpha, 0.0) + coeff
        return MultiPoly(terms, self.dim)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return MultiPoly({a: c * other for a, c in self.terms.items()}, self.dim)
        if other.dim != self.dim:
            raise DimensionMismatch("polynomial dimensions differ")
        terms = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                a = tuple(x + y for x, y in zip(a1, a2))
                terms[a] = terms.get(a, 0.0) + c1 * c2
        return MultiPoly(terms, self.dim)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not (isinstance(n, int) and n >= 0):
            raise ValueError("only nonnegative integer powers")
        out = MultiPoly.constant(1.0, self.dim)
        for _ in range(n):
            out = out * self
        return out

    def eval_i_xi(self, components):
        """Value of p(i xi) with xi given per-component (arrays broadcast together)."""
        if len(components) != self.dim:
            raise DimensionMismatch(
                f"got {len(components)} frequency components, dimension is {self.dim}"
            )
        comps = [np.asarray(c, dtype=float) for c in components]
        out = np.zeros(np.broadcast_shapes(*(c.shape for c in comps)), dtype=np.complex128)
        for alpha, coeff in self.terms.items():
            term = np.full(out.shape, coeff, dtype=np.complex128)
            for c, a in zip(comps, alpha):
                if a:
                    term = term * (1j * c) ** a
            out += term
        return out


def eval_at_i_xi(poly, xi):
    """p(i xi) for a single frequency vector xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (poly.dim,):
        raise DimensionMismatch(f"xi has shape {xi.shape}, expected ({poly.dim},)")
    return complex(poly.eval_i_xi([np.asarray(c) for c in xi]))


def _freq_components(freqs, dim):
    """Normalize a Grid, an (N, d) array, or a list of vectors into components."""
    from .fields import Grid  # local import to avoid a cycle

    if isinstance(freqs, Grid):
        if freqs.dim != dim:
            raise DimensionMismatch("grid dimension does not match polynomial")
        return freqs.freq_mesh()
    arr = np.asarray(freqs, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatch(f"frequency array has shape {arr.shape}, expected (N, {dim})")
    return [arr[:, j] for j in range(dim)]


def min_modulus_on_grid(poly, freqs):
    """Minimum of |p(i xi)| over the frequency set, with its argmin vector."""
    comps = _freq_components(freqs, poly.dim)
    mods = np.abs(poly.eval_i_xi(comps))
    if mods.size == 0:
        raise ValueError("empty frequency set")
    idx = np.unravel_index(np.argmin(mods), mods.shape)
    argmin = np.array([c[idx] for c in comps])
    return float(mods[idx]), argmin


def zero_threshold(poly, scale=defaults.ZERO_THRESHOLD_SCALE):
    return scale * (1.0 + poly.coeff_l1)


@dataclass(frozen=True)
class RationalMultiplier:
    """The Fourier symbol numerator(i xi) / denominator(i xi)."""

    numerator: MultiPoly
    denominator: MultiPoly

    def __post_init__(self):
        if self.numerator.dim != self.denominator.dim:
            raise DimensionMismatch("numerator and denominator dimensions differ")

    @property
    def dim(self):
        return self.numerator.dim

    @classmethod
    def inverse_of(cls, poly):
        return cls(MultiPoly.constant(1.0, poly.dim), poly)

    def symbol(self, components, *, exclude_zero_mode=False):
        """q(i xi)/p(i xi) on component meshes; refuses near-zero denominators.

        With ``exclude_zero_mode`` the xi = 0 entry is gauged to symbol 0 and
        excluded from the zero check (usable when p vanishes only at the
        origin, outside the construction's hypotheses).
        """
        num = self.numerator.eval_i_xi(components)
        den = self.denominator.eval_i_xi(components)
        mods = np.abs(den)
        mask = np.ones(mods.shape, dtype=bool)
        if exclude_zero_mode:
            zero = np.ones(mods.shape, dtype=bool)
            for c in components:
                zero &= np.asarray(c) == 0.0
            mask &= ~zero
        thr = zero_threshold(self.denominator)
        bad = mask & (mods < thr)
        if np.any(bad):
            idx = np.unravel_index(np.argmax(bad), bad.shape)
            freq = [np.asarray(c)[idx] for c in components]
            raise ZeroOnAxis(freq, mods[idx])
        out = np.zeros(np.broadcast_shapes(num.shape, den.shape), dtype=np.complex128)
        np.divide(num, den, out=out, where=mask)
        return out

    def value(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        comps = [np.asarray(c) for c in xi]
        return complex(self.symbol(comps))


@dataclass(frozen=True)
class DecayOrderFit:
    """Least-squares decay order of a rational symbol with derivative constants.

    ``order`` estimates the exponent kappa in |q/p|(i xi) ~ <xi>^-kappa;
    ``constants`` maps each checked multi-index gamma to the fitted constant
    c_gamma bounding |D^gamma (q/p)| <= c_gamma <xi>^(-order-|gamma|).
    """

    order: float
    constants: dict
    residual: float
    n_samples: int


def _directions(dim, count, seed=0):
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(count, dim))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def _multi_indices(dim, max_order):
    idx = {(0,) * dim}
    frontier = set(idx)
    for _ in range(max_order):
        frontier = {
            tuple(a + 1 if k == j else a for k, a in enumerate(alpha))
            for alpha in frontier
            for j in range(dim)
        }
        idx |= frontier
    return sorted(idx, key=lambda a: (sum(a), a))


def _fd_derivative(mult, xi, gamma, step):
    """Iterated central differences of the symbol at a single point."""
    order = sum(gamma)
    if order == 0:
        return mult.value(xi)
    j = next(k for k, a in enumerate(gamma) if a > 0)
    reduced = tuple(a - 1 if k == j else a for k, a in enumerate(gamma))
    plus = np.array(xi, dtype=float)
    minus = np.array(xi, dtype=float)
    plus[j] += step
    minus[j] -= step
    return (_fd_derivative(mult, plus, reduced, step) - _fd_derivative(mult, minus, reduced, step)) / (
        2.0 * step
    )


def estimate_decay_order(
    mult,
    gamma_max=1,
    xi_range=defaults.KAPPA_XI_RANGE,
    shells=defaults.KAPPA_SHELLS,
    directions=defaults.KAPPA_DIRECTIONS,
    residual_threshold=defaults.KAPPA_RESIDUAL_THRESHOLD,
    fd_step_scale=defaults.KAPPA_FD_STEP,
    seed=0,
):
    """Fit the power-decay order of |q/p| on log-spaced shells.

    The slope of log|symbol| against log<xi> over ||xi|| in [1, xi_range]
    gives the order estimate; derivative bounds up to |gamma| <= gamma_max are
    then verified by central finite differences (step ``fd_step_scale * <xi>``)
    and reported as fitted constants. Raises FitFailed when the log-log fit
    residual exceeds ``residual_threshold`` (the symbol is not of pure power
    decay) and ZeroOnAxis when the denominator vanishes at a sample.
    """
    dim = mult.dim
    radii = np.logspace(0.0, math.log10(xi_range), shells)
    dirs = _directions(dim, directions, seed)
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)

    comps = [pts[:, j] for j in range(dim)]
    den = mult.denominator.eval_i_xi(comps)
    thr = zero_threshold(mult.denominator)
    mods_den = np.abs(den)
    if np.any(mods_den < thr):
        i = int(np.argmin(mods_den))
        raise ZeroOnAxis(pts[i], mods_den[i])
    vals = np.abs(mult.numerator.eval_i_xi(comps) / den)

    bracket = np.sqrt(1.0 + np.sum(pts * pts, axis=1))
    good = vals > 0.0
    if np.count_nonzero(good) < 8:
        raise FitFailed("symbol vanishes at almost all sampled frequencies")
    x = np.log(bracket[good])
    y = np.log(vals[good])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if resid > residual_threshold:
        raise FitFailed(
            f"log-log fit residual {resid:.3g} exceeds {residual_threshold}; "
            "symbol is not of pure power decay"
        )
    order = -float(slope)

    constants = {}
    # every 4th shell, all directions, so mixed partials see off-axis points
    sub = pts.reshape(len(radii), len(dirs), dim)[::4].reshape(-1, dim)
    for gamma in _multi_indices(dim, gamma_max):
        bound = 0.0
        for xi in sub:
            step = fd_step_scale * math.sqrt(1.0 + float(np.dot(xi, xi)))
            dval = abs(_fd_derivative(mult, xi, gamma, step))
            w = math.sqrt(1.0 + float(np.dot(xi, xi))) ** (order + sum(gamma))
            bound = max(bound, dval * w)
        constants[gamma] = bound
    return DecayOrderFit(order=order, constants=constants, residual=resid, n_samples=len(pts))
