"""Grid/transform contract, weighted norms, and the field file format."""

import math

import numpy as np
import pytest

from lspde import (
    DomainTagMismatch,
    Field,
    Grid,
    InvalidR,
    MalformedHeader,
    ShapeMismatch,
    dft,
    field_to_csv,
    gaussian_bump,
    idft,
    read_field,
    weighted_lr_norm,
    write_field,
)
from lspde.fields import spectral_l2_norm


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid((48,), (1.0,))  # not a power of two
    with pytest.raises(ValueError):
        Grid((2,), (1.0,))  # below the minimum
    with pytest.raises(ValueError):
        Grid((16, 16), (1.0,))  # box length mismatch
    with pytest.raises(ValueError):
        Grid((8, 8, 8, 8), (1.0,) * 4)  # dimension above 3


def test_dft_constant_field():
    grid = Grid((64,), (12.8,))
    f = Field(grid, np.ones(grid.shape), "physical")
    F = dft(f)
    assert F.values[0] == pytest.approx(12.8, rel=1e-12)
    assert np.max(np.abs(F.values[1:])) < 1e-11


def test_dft_round_trip_random():
    rng = np.random.default_rng(0)
    grid = Grid((32, 32), (5.0, 7.0))
    f = Field(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape), "physical")
    back = idft(dft(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_dft_gaussian_closed_form():
    grid = Grid((512,), (51.2,))
    f = gaussian_bump(grid, (0.0,), 1.0, 1.0)
    F = dft(f)
    xi = grid.freq_axes()[0]
    expected = math.sqrt(2.0 * math.pi) * np.exp(-(xi**2) / 2.0)
    assert np.max(np.abs(F.values - expected)) < 1e-6


def test_from_function_matches_direct_sampling():
    from lspde import from_function

    grid = Grid((32, 16), (8.0, 4.0))
    f = from_function(grid, lambda x, y: np.cos(x) * np.exp(-(y**2)))
    xm, ym = grid.coord_mesh()
    assert np.array_equal(f.values, (np.cos(xm) * np.exp(-(ym**2))).astype(complex))


def test_domain_tags_enforced():
    grid = Grid((16,), (4.0,))
    phys = Field(grid, np.ones(grid.shape), "physical")
    spec = Field(grid, np.ones(grid.shape), "spectral")
    with pytest.raises(DomainTagMismatch):
        dft(spec)
    with pytest.raises(DomainTagMismatch):
        idft(phys)


def test_parseval():
    rng = np.random.default_rng(3)
    grid = Grid((64, 32), (12.8, 6.4))
    f = Field(grid, rng.normal(size=grid.shape), "physical")
    phys_sq = float(np.sum(np.abs(f.values) ** 2) * grid.cell_volume)
    spec_sq = spectral_l2_norm(dft(f)) ** 2 / (2.0 * math.pi) ** grid.dim
    assert phys_sq == pytest.approx(spec_sq, rel=1e-10)


# ---------------------------------------------------------------------- #
# weighted norms
# ---------------------------------------------------------------------- #


def test_weighted_norm_zero_field():
    grid = Grid((32,), (8.0,))
    f = Field(grid, np.zeros(grid.shape), "physical")
    assert weighted_lr_norm(f, 2.0, -1.0) == 0.0


def test_weighted_norm_sup_constant():
    grid = Grid((32,), (8.0,))
    f = Field(grid, np.ones(grid.shape), "physical")
    assert weighted_lr_norm(f, math.inf, 0.0) == pytest.approx(1.0)


def test_weighted_norm_refinement_oracle():
    vals = []
    for n in (256, 1024):
        grid = Grid((n,), (25.6,))
        f = gaussian_bump(grid, (0.7,), 1.8, 1.0)
        vals.append(weighted_lr_norm(f, 2.0, -1.0))
    assert vals[0] == pytest.approx(vals[1], rel=0.01)


def test_weighted_norm_matches_unweighted_at_rho_zero():
    grid = Grid((64,), (16.0,))
    f = gaussian_bump(grid, (0.0,), 2.0)
    plain = float(np.sum(np.abs(f.values) ** 2) * grid.cell_volume) ** 0.5
    assert weighted_lr_norm(f, 2.0, 0.0) == pytest.approx(plain, rel=1e-12)


def test_weighted_norm_monotone_in_rho():
    grid = Grid((64,), (16.0,))
    f = gaussian_bump(grid, (1.0,), 2.0)
    norms = [weighted_lr_norm(f, 2.0, rho) for rho in (-2.0, -1.0, 0.0, 1.0)]
    assert all(a <= b for a, b in zip(norms, norms[1:]))


def test_weighted_norm_invalid_r():
    grid = Grid((16,), (4.0,))
    f = Field(grid, np.ones(grid.shape), "physical")
    for bad in (0.0, -2.0):
        with pytest.raises(InvalidR):
            weighted_lr_norm(f, bad, 0.0)


# ---------------------------------------------------------------------- #
# file format
# ---------------------------------------------------------------------- #


def _sample_field():
    rng = np.random.default_rng(7)
    grid = Grid((16, 8), (3.5, 2.25))
    vals = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    return Field(grid, vals, "spectral", meta={"note": "test", "n": 3})


def test_file_round_trip_bitwise(tmp_path):
    f = _sample_field()
    path = tmp_path / "f.field"
    write_field(f, path)
    back = read_field(path)
    assert back.grid == f.grid
    assert back.domain == f.domain
    assert back.meta == f.meta
    assert np.array_equal(back.values, f.values)
    # writing again produces identical bytes
    path2 = tmp_path / "g.field"
    write_field(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_truncated_header_rejected(tmp_path):
    path = tmp_path / "t.field"
    path.write_bytes(b"LSPDE-FIELD 1\ndim 1\nshape 16\n")
    with pytest.raises(MalformedHeader):
        read_field(path)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "b.field"
    path.write_bytes(b"SOMETHING 9\n\n")
    with pytest.raises(MalformedHeader):
        read_field(path)


def test_payload_length_mismatch(tmp_path):
    f = _sample_field()
    path = tmp_path / "p.field"
    write_field(f, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(ShapeMismatch):
        read_field(path)


def test_big_endian_values_normalized_on_write(tmp_path):
    grid = Grid((8,), (2.0,))
    rng = np.random.default_rng(1)
    vals_le = (rng.normal(size=8) + 1j * rng.normal(size=8)).astype("<c16")
    vals_be = vals_le.astype(">c16")
    a, b = tmp_path / "le.field", tmp_path / "be.field"
    write_field(Field(grid, vals_le, "physical"), a)
    write_field(Field(grid, vals_be, "physical"), b)
    assert a.read_bytes() == b.read_bytes()
    assert np.array_equal(read_field(a).values, read_field(b).values)


def test_csv_export(tmp_path):
    grid = Grid((8,), (2.0,))
    f = gaussian_bump(grid, (0.0,), 0.5)
    path = tmp_path / "f.csv"
    field_to_csv(f, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "x1,re,im"
    assert len(lines) == 1 + grid.size
    x, re, im = (float(v) for v in lines[1].split(","))
    assert x == pytest.approx(-1.0)
    assert re == pytest.approx(float(f.values.real[0]))
    assert im == 0.0
