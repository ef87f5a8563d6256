"""Jump measures: atoms plus density pieces, with quadrature-backed moments.

A jump measure nu lives on R minus {0} and must satisfy
``integral of min(1, x^2) nu(dx) < infinity``; that is verified numerically at
construction. Moment integrals that may legitimately diverge (tail moments,
admissibility integrals) return ``math.inf`` instead of raising, since
divergence is an answer when checking existence conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral
from .quadrature import integrate_positive


@dataclass(frozen=True)
class PowerDensity:
    """Density coeff*|x|^exponent on one side of the origin.

    ``lower``/``upper`` are signed and have the same sign (``lower`` may be 0
    approached from above, ``upper`` may be +/-inf on the unbounded side).
    """

    coeff: float
    exponent: float
    lower: float
    upper: float

    def __post_init__(self):
        if not self.coeff > 0:
            raise ValueError("coeff must be positive")
        if not self.lower < self.upper:
            raise ValueError("need lower < upper")
        if self.lower < 0 < self.upper:
            raise ValueError("support must not straddle 0")
        unbounded = (math.isinf(self.upper) and self.upper > 0) or (
            math.isinf(self.lower) and self.lower < 0
        )
        if unbounded and self.exponent >= -1:
            raise DivergentIntegral("tail mass of power density is infinite")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower) & (x <= self.upper) & (x != 0.0)
        out = np.zeros_like(x)
        out[inside] = self.coeff * np.abs(x[inside]) ** self.exponent
        return out

    @property
    def abs_support(self):
        """Support expressed in |x|: (lo, hi) with 0 <= lo < hi."""
        if self.upper <= 0:
            return abs(self.upper), abs(self.lower)
        return self.lower, self.upper

    @property
    def negative_side(self):
        return self.upper <= 0

    @property
    def breakpoints(self):
        return ()

    def mass_between(self, lo, hi):
        """Closed-form integral of the density over lo < |x| <= hi."""
        a, b = self.abs_support
        lo, hi = max(lo, a), min(hi, b)
        if lo >= hi:
            return 0.0
        p = self.exponent
        if p == -1.0:
            return self.coeff * math.log(hi / lo)
        return self.coeff * (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)

    def sample_between(self, lo, hi, u):
        """Inverse-CDF draw of the jump restricted to lo < |x| <= hi, u uniform(0,1)."""
        a, b = self.abs_support
        lo, hi = max(lo, a), min(hi, b)
        p = self.exponent
        if p == -1.0:
            r = lo * (hi / lo) ** u
        else:
            r = (lo ** (p + 1) + u * (hi ** (p + 1) - lo ** (p + 1))) ** (1.0 / (p + 1))
        return -r if self.negative_side else r

    def to_config(self):
        return {
            "kind": "power",
            "coeff": self.coeff,
            "exponent": self.exponent,
            "lower": self.lower,
            "upper": self.upper,
        }


@dataclass(frozen=True)
class TabulatedDensity:
    """Piecewise-linear density on the finite one-sided interval [xs[0], xs[-1]]."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != ys.shape:
            raise ValueError("need matching 1-d xs/ys with at least two points")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(ys < 0):
            raise ValueError("ys must be nonnegative")
        if xs[0] <= 0 <= xs[-1]:
            raise ValueError("support must not contain 0")
        object.__setattr__(self, "xs", tuple(float(v) for v in xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in ys))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        out = np.interp(x, xs, ys, left=0.0, right=0.0)
        return np.where((x >= xs[0]) & (x <= xs[-1]), out, 0.0)

    @property
    def abs_support(self):
        if self.xs[-1] <= 0:
            return abs(self.xs[-1]), abs(self.xs[0])
        return self.xs[0], self.xs[-1]

    @property
    def negative_side(self):
        return self.xs[-1] <= 0

    @property
    def breakpoints(self):
        return tuple(sorted(abs(x) for x in self.xs))

    def _abs_table(self):
        """Tabulation in the |x| variable, ascending."""
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        if self.negative_side:
            return np.abs(xs)[::-1].copy(), ys[::-1].copy()
        return xs.copy(), ys.copy()

    def mass_between(self, lo, hi):
        xs, ys = self._abs_table()
        lo, hi = max(lo, xs[0]), min(hi, xs[-1])
        if lo >= hi:
            return 0.0
        grid = np.unique(np.concatenate([[lo, hi], xs[(xs > lo) & (xs < hi)]]))
        vals = np.interp(grid, xs, ys)
        return float(np.trapezoid(vals, grid))

    def sample_between(self, lo, hi, u):
        """Exact inverse-CDF draw from the linear segments on lo < |x| <= hi."""
        xs, ys = self._abs_table()
        lo, hi = max(lo, xs[0]), min(hi, xs[-1])
        grid = np.unique(np.concatenate([[lo, hi], xs[(xs > lo) & (xs < hi)]]))
        vals = np.interp(grid, xs, ys)
        seg_mass = 0.5 * (vals[:-1] + vals[1:]) * np.diff(grid)
        cum = np.concatenate([[0.0], np.cumsum(seg_mass)])
        target = u * cum[-1]
        i = int(np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(seg_mass) - 1))
        rem = target - cum[i]
        x0, x1 = grid[i], grid[i + 1]
        y0, y1 = vals[i], vals[i + 1]
        slope = (y1 - y0) / (x1 - x0)
        # solve y0*t + slope*t^2/2 = rem for the offset t in [0, x1-x0]
        if abs(slope) < 1e-300:
            t = rem / y0 if y0 > 0 else 0.0
        else:
            disc = max(y0 * y0 + 2.0 * slope * rem, 0.0)
            t = (math.sqrt(disc) - y0) / slope
        r = float(np.clip(x0 + t, x0, x1))
        return -r if self.negative_side else r

    def to_config(self):
        return {"kind": "tabulated", "xs": list(self.xs), "ys": list(self.ys)}


def density_from_config(cfg):
    kind = cfg.get("kind")
    if kind == "power":
        return PowerDensity(cfg["coeff"], cfg["exponent"], cfg["lower"], cfg["upper"])
    if kind == "tabulated":
        return TabulatedDensity(tuple(cfg["xs"]), tuple(cfg["ys"]))
    raise ValueError(f"unknown density kind {kind!r}")


class LevyMeasure:
    """Atoms plus density pieces; carries every moment the conditions need.

    Regions are given in |x| as half-open intervals (lo, hi]; that one shape
    covers all integrals used here: small jumps (0, delta], the compensator
    band (delta, 1], and tails (threshold, inf).
    """

    def __init__(self, atoms=(), densities=()):
        self.atoms = []
        for loc, weight in atoms:
            loc, weight = float(loc), float(weight)
            if loc == 0.0:
                raise ValueError("no atom at 0 allowed")
            if not weight > 0:
                raise ValueError("atom weights must be positive")
            self.atoms.append((loc, weight))
        self.densities = list(densities)
        self._validate()

    def _validate(self):
        val = self.integral(
            lambda x: np.minimum(1.0, x * x), 0.0, math.inf, on_divergence=DivergentIntegral
        )
        if not math.isfinite(val):
            raise DivergentIntegral("min(1, x^2) mass is not finite")

    def __repr__(self):
        return f"LevyMeasure(atoms={self.atoms!r}, densities={self.densities!r})"

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def atom(cls, location, weight=1.0):
        return cls(atoms=[(location, weight)])

    @property
    def is_zero(self):
        return not self.atoms and not self.densities

    # ------------------------------------------------------------------ #
    # integration
    # ------------------------------------------------------------------ #

    def integral(self, f, lo, hi, *, max_width=None, on_divergence=math.inf):
        """Integral of f(x) nu(dx) over lo < |x| <= hi; f is vectorized in signed x.

        On detected divergence returns ``on_divergence`` if it is a value, or
        raises it if it is an exception class.
        """
        total = 0.0 + 0.0j
        for loc, weight in self.atoms:
            if lo < abs(loc) <= hi:
                total += weight * complex(np.asarray(f(np.array([loc]))).reshape(-1)[0])
        diverged = False
        for piece in self.densities:
            a, b = piece.abs_support
            plo, phi = max(lo, a), min(hi, b)
            if plo >= phi:
                continue
            sign = -1.0 if piece.negative_side else 1.0

            def g(r, piece=piece, sign=sign):
                return np.asarray(f(sign * r)) * piece.value(sign * r)

            val, ok = integrate_positive(
                g, plo, phi, breakpoints=piece.breakpoints, max_width=max_width
            )
            if not ok:
                diverged = True
                break
            total += val
        if diverged or not np.isfinite(total):
            if isinstance(on_divergence, type) and issubclass(on_divergence, Exception):
                raise on_divergence("integral over the jump measure diverges")
            return on_divergence
        if total.imag == 0.0:
            return total.real
        return complex(total)

    # ------------------------------------------------------------------ #
    # moments
    # ------------------------------------------------------------------ #

    def min_one_x2_mass(self):
        """Integral of min(1, x^2) over the whole measure; finite for a valid measure."""
        return float(
            self.integral(
                lambda x: np.minimum(1.0, x * x), 0.0, math.inf, on_divergence=DivergentIntegral
            )
        )

    def epsilon_moment(self, eps):
        """Tail moment of |x|^eps over |x| > 1; math.inf signals divergence."""
        if not eps > 0:
            raise ValueError("eps must be positive")
        return float(self.integral(lambda x: np.abs(x) ** eps, 1.0, math.inf))

    def log_moment(self, d):
        """Tail moment of log(|x|)^d over |x| > 1; math.inf signals divergence."""
        if not (isinstance(d, (int, np.integer)) and d >= 1):
            raise ValueError("d must be a positive integer")
        return float(self.integral(lambda x: np.log(np.abs(x)) ** d, 1.0, math.inf))

    def second_moment(self):
        """Integral of x^2 over the whole measure; math.inf when the tail diverges."""
        return float(self.integral(lambda x: x * x, 0.0, math.inf))

    def tail_first_moment(self):
        """Integral of x over |x| > 1 (signed); math.inf when divergent."""
        return float(self.integral(lambda x: x, 1.0, math.inf))

    def small_jump_variance(self, delta):
        """Variance contributed by jumps of size at most delta."""
        if not 0 < delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        return float(
            self.integral(lambda x: x * x, 0.0, delta, on_divergence=DivergentIntegral)
        )

    def tail_mass_and_compensator(self, delta):
        """Mass of {|x| > delta} and the drift correction over delta < |x| <= 1."""
        if not delta > 0:
            raise ValueError("delta must be positive")
        mass = float(
            self.integral(
                lambda x: np.ones_like(np.asarray(x, dtype=float)),
                delta,
                math.inf,
                on_divergence=DivergentIntegral,
            )
        )
        if delta >= 1.0:
            mean = 0.0
        else:
            mean = float(
                self.integral(lambda x: x, delta, 1.0, on_divergence=DivergentIntegral)
            )
        return mass, mean

    # ------------------------------------------------------------------ #
    # serialization
    # ------------------------------------------------------------------ #

    def to_config(self):
        out = [{"atom": [loc, w]} for loc, w in self.atoms]
        out.extend({"density": piece.to_config()} for piece in self.densities)
        return out

    @classmethod
    def from_config(cls, entries):
        atoms, densities = [], []
        for entry in entries:
            if "atom" in entry:
                atoms.append(tuple(entry["atom"]))
            elif "density" in entry:
                densities.append(density_from_config(entry["density"]))
            else:
                raise ValueError(f"unknown measure entry {entry!r}")
        return cls(atoms=atoms, densities=densities)
