"""Dyadic partition of unity, frequency blocks, weighted Besov and Sobolev
norms, and the embedding predicate between Besov spaces.

The base profile equals 1 inside the unit ball and 0 outside radius 3/2, with
a C-infinity transition built from the normalized integral of the canonical
bump exp(-s/(u(1-u))). Blocks are differences of dilates of that profile, so
the telescoping identity sum_{k<=K} phi_k = phi_0(2^-K .) holds exactly by
construction, independent of how accurately the transition is tabulated.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BlockTruncatedWarning, InvalidR, PreconditionViolated
from .fields import Field, dft, idft, spectral_l2_norm, weighted_lr_norm
from .quadrature import panel_nodes


@dataclass(frozen=True)
class BesovParams:
    """Four-parameter index of a weighted Besov norm."""

    smoothness: float
    integrability: float
    summability: float
    weight: float = 0.0

    def __post_init__(self):
        if not self.integrability > 0:
            raise InvalidR("integrability exponent must be positive")
        if not self.summability > 0:
            raise InvalidR("summability exponent must be positive")


class DyadicPartition:
    """Radial dyadic decomposition of unity on frequency space."""

    _TABLE_SIZE = 8192
    _table_cache = {}

    def __init__(self, sharpness=1.0):
        if not sharpness > 0:
            raise ValueError("profile sharpness must be positive")
        self.sharpness = float(sharpness)
        if self.sharpness not in self._table_cache:
            self._table_cache[self.sharpness] = self._build_table(self.sharpness)
        self._grid, self._cdf = self._table_cache[self.sharpness]

    @classmethod
    def _build_table(cls, sharpness):
        # cumulative integral of the bump exp(-s/(u(1-u))) on (0, 1), normalized
        edges = np.linspace(0.0, 1.0, cls._TABLE_SIZE + 1)
        cum = np.zeros_like(edges)

        def bump(u):
            out = np.zeros_like(u)
            inside = (u > 0.0) & (u < 1.0)
            ui = u[inside]
            out[inside] = np.exp(-sharpness / (ui * (1.0 - ui)))
            return out

        for i in range(cls._TABLE_SIZE):
            x, w = panel_nodes(edges[i], edges[i + 1], 8)
            cum[i + 1] = cum[i] + np.sum(w * bump(x))
        cum /= cum[-1]
        return edges, cum

    def _smoothstep(self, s):
        """Normalized C-infinity step: 0 at 0, 1 at 1."""
        s = np.clip(s, 0.0, 1.0)
        return np.interp(s, self._grid, self._cdf)

    def profile(self, r):
        """Base radial profile: 1 for r <= 1, 0 for r >= 3/2, smooth between."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        out[r <= 1.0] = 1.0
        mid = (r > 1.0) & (r < 1.5)
        out[mid] = self._smoothstep(3.0 - 2.0 * r[mid])
        return out

    def block_profile(self, k, r):
        """phi_k(r): the base profile for k = 0, dilation differences for k >= 1."""
        if k < 0:
            raise ValueError("block index must be nonnegative")
        r = np.asarray(r, dtype=float)
        if k == 0:
            return self.profile(r)
        return self.profile(r * 2.0**-k) - self.profile(r * 2.0 ** (-k + 1))

    def max_block(self, grid):
        """Largest block index with any support on the grid's frequency lattice."""
        return max(0, int(math.floor(1.0 + math.log2(grid.max_freq_radius))))

    def block_truncated(self, k, grid):
        """True when the block's outer radius exceeds the per-axis Nyquist radius."""
        return 3.0 * 2.0 ** (k - 1) > grid.nyquist_radius


def make_partition(profile_sharpness=1.0):
    return DyadicPartition(profile_sharpness)


def lp_block(f, k, part):
    """Frequency block of a physical field: inverse transform of phi_k * dft(f).

    Blocks whose annulus is clipped by the Nyquist radius are still returned,
    with a BlockTruncatedWarning.
    """
    F = dft(f)
    grid = f.grid
    w = part.block_profile(k, grid.freq_radius)
    if part.block_truncated(k, grid):
        warnings.warn(
            f"block {k} extends past the Nyquist radius {grid.nyquist_radius:.4g}",
            BlockTruncatedWarning,
            stacklevel=2,
        )
    return idft(Field(grid, F.values * w, "spectral"))


@dataclass(frozen=True)
class BlockNorm:
    k: int
    value: float
    truncated: bool


def besov_profile(f, params, part):
    """Per-block scaled norms 2^(l k) ||Delta_k f||_{L^r(rho)} for k = 0..K_max."""
    grid = f.grid
    F = dft(f)
    radius = grid.freq_radius
    out = []
    for k in range(part.max_block(grid) + 1):
        w = part.block_profile(k, radius)
        block = idft(Field(grid, F.values * w, "spectral"))
        norm = weighted_lr_norm(block, params.integrability, params.weight)
        out.append(
            BlockNorm(
                k=k,
                value=2.0 ** (params.smoothness * k) * norm,
                truncated=part.block_truncated(k, grid),
            )
        )
    return out


def besov_norm(f, params, part):
    """Weighted Besov norm: l^t aggregation of the block profile."""
    values = np.array([b.value for b in besov_profile(f, params, part)])
    t = params.summability
    if math.isinf(t):
        return float(np.max(values)) if values.size else 0.0
    return float(np.sum(values**t) ** (1.0 / t))


def sobolev_norm(f, smoothness, weight=0.0, part=None):
    """Sobolev norm realized as the (l, 2, 2, rho) Besov norm."""
    part = part or make_partition()
    return besov_norm(f, BesovParams(smoothness, 2.0, 2.0, weight), part)


def spectral_sobolev_norm(f, smoothness):
    """Direct spectral Sobolev norm (unweighted): ||<xi>^l dft(f)|| / (2 pi)^(d/2).

    Equivalent to ``sobolev_norm(f, l, 0)`` up to a fixed constant bracket;
    the bracket is measured, not assumed 1 (see sobolev_equivalence_bracket).
    """
    F = dft(f)
    bracket = np.sqrt(1.0 + f.grid.freq_radius**2)
    weighted = Field(f.grid, F.values * bracket**smoothness, "spectral")
    return spectral_l2_norm(weighted) / (2.0 * math.pi) ** (f.grid.dim / 2.0)


def sobolev_equivalence_bracket(grid, smoothness, part=None, n_fields=8, seed=0):
    """Measured (low, high) ratio of the Besov-form to the spectral-form norm."""
    part = part or make_partition()
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n_fields):
        spec = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        # taper to keep energy below Nyquist so truncation does not bias the ratio
        taper = np.exp(-((grid.freq_radius / (0.5 * grid.nyquist_radius)) ** 4))
        f = idft(Field(grid, spec * taper, "spectral"))
        num = sobolev_norm(f, smoothness, 0.0, part)
        den = spectral_sobolev_norm(f, smoothness)
        ratios.append(num / den)
    return float(np.min(ratios)), float(np.max(ratios))


class Embedding(enum.Enum):
    EMBEDDED = "embedded"
    COMPACTLY_EMBEDDED = "compactly-embedded"
    NOT_IMPLIED = "not-implied"


def embedding_check(src, dst, d):
    """Embedding verdict between B^tau0_{p0,p0}(rho0) and B^tau1_{p1,p1}(rho1).

    Continuous embedding requires tau0 - tau1 >= d/p0 - d/p1, p1 >= p0 and
    rho0 >= rho1; all three strict gives a compact embedding. Anything else is
    reported as not implied by these conditions.
    """
    tau0, p0, rho0 = (float(v) for v in src)
    tau1, p1, rho1 = (float(v) for v in dst)
    if not (p0 > 0 and p1 > 0):
        raise InvalidR("integrability exponents must be positive")
    if tau0 < tau1:
        raise PreconditionViolated("source smoothness must be at least the target smoothness")
    gap = tau0 - tau1
    need = d / p0 - d / p1
    if gap > need and p1 > p0 and rho0 > rho1:
        return Embedding.COMPACTLY_EMBEDDED
    if gap >= need and p1 >= p0 and rho0 >= rho1:
        return Embedding.EMBEDDED
    return Embedding.NOT_IMPLIED
