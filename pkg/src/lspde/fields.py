"""Periodic grids, sampled fields, the discrete Fourier contract, and file I/O.

The transform pair mimics the continuum convention
``F f(xi) = integral of exp(-i <xi, x>) f(x) dx`` on the centered fundamental
domain: the forward transform carries the cell volume, the inverse carries
``(2 pi)^-d`` times the frequency cell volume, so band-limited analytic pairs
match their closed forms and ``idft(dft(f)) == f`` to machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np

from .errors import DomainTagMismatch, InvalidR, MalformedHeader, ShapeMismatch

PHYSICAL = "physical"
SPECTRAL = "spectral"

_MAGIC = "LSPDE-FIELD 1"
_DTYPE = "c128-le"


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on a centered box, dimensions 1 to 3.

    Point counts are powers of two (>= 4). Coordinates along axis j are
    ``(k - n_j/2) * h_j`` for k = 0..n_j-1, so the box is [-L_j/2, L_j/2).
    Frequencies are ``2 pi m / L_j`` with integer m in [-n_j/2, n_j/2),
    stored in FFT order.
    """

    shape: tuple
    box: tuple

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        box = tuple(float(L) for L in self.box)
        if not 1 <= len(shape) <= 3:
            raise ValueError("supported dimensions are 1 to 3")
        if len(shape) != len(box):
            raise ValueError("shape and box must have equal length")
        if any(n < 4 or not _is_pow2(n) for n in shape):
            raise ValueError("per-axis point counts must be powers of two, at least 4")
        if any(L <= 0 for L in box):
            raise ValueError("box lengths must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "box", box)

    @property
    def dim(self):
        return len(self.shape)

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.box, self.shape))

    @property
    def cell_volume(self):
        return math.prod(self.spacing)

    @property
    def size(self):
        return math.prod(self.shape)

    def coord_axes(self):
        return [
            (np.arange(n) - n // 2) * h for n, h in zip(self.shape, self.spacing)
        ]

    def coord_mesh(self):
        return np.meshgrid(*self.coord_axes(), indexing="ij")

    def freq_axes(self):
        """Per-axis frequencies in FFT storage order."""
        return [
            2.0 * math.pi * np.fft.fftfreq(n, d=h) for n, h in zip(self.shape, self.spacing)
        ]

    def freq_mesh(self):
        return np.meshgrid(*self.freq_axes(), indexing="ij")

    @cached_property
    def freq_radius(self):
        mesh = self.freq_mesh()
        return np.sqrt(sum(m * m for m in mesh))

    @property
    def nyquist_radius(self):
        """Largest frequency magnitude representable along every axis."""
        return min(math.pi / h for h in self.spacing)

    @property
    def max_freq_radius(self):
        """Largest ||xi|| on the lattice (attained at the corner)."""
        return math.sqrt(sum((math.pi / h) ** 2 for h in self.spacing))

    @cached_property
    def _alternating_sign(self):
        # exp(i pi m) per axis, combined; relates centered coordinates to FFT order
        out = np.ones(self.shape)
        for axis, n in enumerate(self.shape):
            m = np.rint(np.fft.fftfreq(n) * n).astype(int)
            s = np.where(m % 2 == 0, 1.0, -1.0)
            shape = [1] * self.dim
            shape[axis] = n
            out = out * s.reshape(shape)
        return out

    @cached_property
    def polynomial_weight(self):
        """<x> = sqrt(1 + ||x||^2) on the centered fundamental domain."""
        mesh = self.coord_mesh()
        return np.sqrt(1.0 + sum(m * m for m in mesh))


@dataclass
class Field:
    """Complex samples on a grid, tagged physical or spectral."""

    grid: Grid
    values: np.ndarray
    domain: str
    meta: dict | None = dataclass_field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"value shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.domain not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown domain tag {self.domain!r}")

    def copy(self):
        return Field(self.grid, self.values.copy(), self.domain, meta=dict(self.meta or {}) or None)

    def __add__(self, other):
        self._check_compatible(other)
        return Field(self.grid, self.values + other.values, self.domain)

    def __sub__(self, other):
        self._check_compatible(other)
        return Field(self.grid, self.values - other.values, self.domain)

    def __mul__(self, scalar):
        return Field(self.grid, self.values * scalar, self.domain)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if self.grid != other.grid or self.domain != other.domain:
            raise DomainTagMismatch("fields live on different grids or domains")

    @property
    def max_imag(self):
        return float(np.max(np.abs(self.values.imag))) if self.values.size else 0.0

    def real_values(self):
        return self.values.real.copy()


def zeros(grid, domain=PHYSICAL):
    return Field(grid, np.zeros(grid.shape, dtype=np.complex128), domain)


def from_function(grid, fn, domain=PHYSICAL):
    """Sample ``fn`` on the grid: physical functions get coordinates, spectral get frequencies."""
    mesh = grid.coord_mesh() if domain == PHYSICAL else grid.freq_mesh()
    return Field(grid, np.asarray(fn(*mesh), dtype=np.complex128), domain)


def gaussian_bump(grid, center=None, width=1.0, amplitude=1.0):
    """Smooth localized test function exp(-||x - c||^2 / (2 width^2))."""
    center = tuple(center) if center is not None else (0.0,) * grid.dim
    mesh = grid.coord_mesh()
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    return Field(grid, amplitude * np.exp(-r2 / (2.0 * width**2)).astype(np.complex128), PHYSICAL)


def rolled(f, shift):
    """Field translated by an integer lattice shift (periodic)."""
    shift = tuple(int(s) for s in shift)
    return Field(f.grid, np.roll(f.values, shift, axis=tuple(range(f.grid.dim))), f.domain)


# ---------------------------------------------------------------------- #
# transforms
# ---------------------------------------------------------------------- #


def dft(f):
    """Forward transform: physical samples -> spectral samples (continuum scaling)."""
    if f.domain != PHYSICAL:
        raise DomainTagMismatch("dft expects a physical field")
    g = f.grid
    vals = g.cell_volume * g._alternating_sign * np.fft.fftn(f.values)
    return Field(g, vals, SPECTRAL)


def idft(F):
    """Inverse transform: spectral samples -> physical samples."""
    if F.domain != SPECTRAL:
        raise DomainTagMismatch("idft expects a spectral field")
    g = F.grid
    vals = np.fft.ifftn(g._alternating_sign * F.values) / g.cell_volume
    return Field(g, vals, PHYSICAL)


# ---------------------------------------------------------------------- #
# norms
# ---------------------------------------------------------------------- #


def weighted_lr_norm(f, r, rho=0.0):
    """Weighted L^r norm with polynomial weight <x>^rho on the centered box.

    Values of r in (0, 1) are evaluated formula-level (quasi-norm); r must be
    positive, possibly math.inf.
    """
    if f.domain != PHYSICAL:
        raise DomainTagMismatch("weighted norms are defined on physical fields")
    if not (isinstance(r, (int, float)) and r > 0):
        raise InvalidR(f"integrability exponent must be positive, got {r!r}")
    w = f.grid.polynomial_weight**rho * np.abs(f.values)
    if math.isinf(r):
        return float(np.max(w))
    return float(np.sum(w**r) * f.grid.cell_volume) ** (1.0 / r)


def spectral_l2_norm(F):
    """Discrete L^2 norm on the frequency lattice (cell volume = prod d xi)."""
    if F.domain != SPECTRAL:
        raise DomainTagMismatch("expected a spectral field")
    dxi = math.prod(2.0 * math.pi / L for L in F.grid.box)
    return float(math.sqrt(np.sum(np.abs(F.values) ** 2) * dxi))


# ---------------------------------------------------------------------- #
# file format v1
# ---------------------------------------------------------------------- #


def write_field(f, path):
    """Write the bit-exact field file format (ASCII header + little-endian payload)."""
    lines = [
        _MAGIC,
        f"dim {f.grid.dim}",
        "shape " + " ".join(str(n) for n in f.grid.shape),
        "box " + " ".join(repr(L) for L in f.grid.box),
        f"domain {f.domain}",
        f"dtype {_DTYPE}",
    ]
    if f.meta:
        lines.append("meta " + json.dumps(f.meta, sort_keys=True, separators=(",", ":")))
    header = "\n".join(lines) + "\n\n"
    payload = np.ascontiguousarray(f.values, dtype=np.complex128).astype("<c16").tobytes("C")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def read_field(path):
    """Read a field file; raises MalformedHeader / ShapeMismatch on bad input."""
    with open(path, "rb") as fh:
        raw = fh.read()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise MalformedHeader("missing blank line terminating the header")
    try:
        header_lines = raw[:sep].decode("ascii").split("\n")
    except UnicodeDecodeError as exc:
        raise MalformedHeader("header is not ASCII") from exc
    if not header_lines or header_lines[0] != _MAGIC:
        raise MalformedHeader(f"bad magic line {header_lines[:1]!r}")
    entries = {}
    for line in header_lines[1:]:
        key, _, rest = line.partition(" ")
        if not key or not rest:
            raise MalformedHeader(f"bad header line {line!r}")
        entries[key] = rest
    try:
        dim = int(entries["dim"])
        shape = tuple(int(v) for v in entries["shape"].split())
        box = tuple(float(v) for v in entries["box"].split())
        domain = entries["domain"]
        dtype = entries["dtype"]
    except (KeyError, ValueError) as exc:
        raise MalformedHeader(f"incomplete or invalid header: {exc}") from exc
    if dtype != _DTYPE:
        raise MalformedHeader(f"unsupported dtype {dtype!r}")
    if domain not in (PHYSICAL, SPECTRAL):
        raise MalformedHeader(f"unknown domain {domain!r}")
    if len(shape) != dim or len(box) != dim:
        raise MalformedHeader("dim does not match shape/box entries")
    meta = None
    if "meta" in entries:
        try:
            meta = json.loads(entries["meta"])
        except json.JSONDecodeError as exc:
            raise MalformedHeader("meta line is not valid JSON") from exc
    grid = Grid(shape, box)
    payload = raw[sep + 2 :]
    expected = 16 * grid.size
    if len(payload) != expected:
        raise ShapeMismatch(f"payload holds {len(payload)} bytes, header implies {expected}")
    values = np.frombuffer(payload, dtype="<c16").astype(np.complex128).reshape(shape)
    return Field(grid, values, domain, meta=meta)


def field_to_csv(f, path):
    """One row per cell: coordinates (or frequencies) then re, im."""
    mesh = f.grid.coord_mesh() if f.domain == PHYSICAL else f.grid.freq_mesh()
    cols = [m.ravel(order="C") for m in mesh]
    vals = f.values.ravel(order="C")
    names = [f"x{j + 1}" for j in range(f.grid.dim)] if f.domain == PHYSICAL else [
        f"xi{j + 1}" for j in range(f.grid.dim)
    ]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names + ["re", "im"]) + "\n")
        for i in range(vals.size):
            coords = ",".join(repr(float(c[i])) for c in cols)
            fh.write(f"{coords},{float(vals[i].real)!r},{float(vals[i].imag)!r}\n")
