"""Multiplier application, residual identity, covariance, stationarity."""

import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from lspde import (
    BesovParams,
    Field,
    Grid,
    LevyMeasure,
    LevyNoiseSampler,
    LevyTriplet,
    MultiPoly,
    RationalMultiplier,
    ZeroOnAxis,
    apply_multiplier,
    besov_profile,
    bump_battery,
    dft,
    gaussian_bump,
    idft,
    make_partition,
    sample_noise,
    solve_linear,
    spectral_residual,
    stationarity_test,
    variance_spectrum,
)

GRID = Grid((64,), (4.0 * math.pi,))
P1 = MultiPoly.helmholtz(1.0, 1, 1)
Q1 = MultiPoly.constant(1.0, 1)
GAUSS = LevyTriplet.gaussian(1.0)


def test_identity_multiplier():
    noise = sample_noise(GAUSS, GRID, 0.01, 1)
    f = noise.density_field()
    out = apply_multiplier(RationalMultiplier(P1, P1), f)
    assert np.max(np.abs(out.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_single_mode_eigenfunction():
    grid = Grid((64,), (2.0 * math.pi * 64.0 / 32.0,))
    xi = grid.freq_axes()[0]
    idx = int(np.argmin(np.abs(xi - 4.0)))
    xi0 = float(xi[idx])
    spec = np.zeros(grid.shape, dtype=np.complex128)
    spec[idx] = 1.0
    mode = idft(Field(grid, spec, "spectral"))
    out = apply_multiplier(RationalMultiplier(Q1, P1), mode)
    assert np.max(np.abs(out.values - mode.values / (1.0 + xi0**2))) <= 1e-14


def test_multiplier_matches_per_mode_division_oracle():
    rng = np.random.default_rng(8)
    grid = Grid((32, 32), (8.0, 6.0))
    p = MultiPoly.helmholtz(2.0, 1, 2)
    q = MultiPoly({(0, 0): 1.0, (1, 0): 0.5, (0, 2): -0.3}, 2)
    f = Field(grid, rng.normal(size=grid.shape), "physical")
    out = apply_multiplier(RationalMultiplier(q, p), f)
    mesh = grid.freq_mesh()
    oracle_hat = np.empty(grid.shape, dtype=np.complex128)
    F = dft(f).values
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            xi = (mesh[0][i, j], mesh[1][i, j])
            num = sum(c * (1j * xi[0]) ** a[0] * (1j * xi[1]) ** a[1] for a, c in q.terms.items())
            den = sum(c * (1j * xi[0]) ** a[0] * (1j * xi[1]) ** a[1] for a, c in p.terms.items())
            oracle_hat[i, j] = F[i, j] * num / den
    oracle = idft(Field(grid, oracle_hat, "spectral"))
    assert np.max(np.abs(out.values - oracle.values)) <= 1e-12 * np.max(np.abs(oracle.values))


def test_real_output_for_real_input():
    noise = sample_noise(GAUSS, GRID, 0.01, 5)
    s = solve_linear(P1, Q1, noise)
    assert s.max_imag <= 1e-9 * np.max(np.abs(s.values.real))


def test_solution_is_noise_when_q_equals_p():
    noise = sample_noise(GAUSS, GRID, 0.01, 2)
    s = solve_linear(P1, P1, noise)
    w = noise.density_field()
    assert np.max(np.abs(s.values - w.values)) <= 1e-12 * np.max(np.abs(w.values))


def test_spectral_residual_identity():
    noise = sample_noise(GAUSS, GRID, 0.01, 3)
    q = MultiPoly({(0,): 0.7, (1,): -0.4, (2,): 0.2}, 1)
    s = solve_linear(P1, q, noise)
    assert spectral_residual(P1, q, noise, s) <= 1e-10


def test_zero_on_axis_refusal():
    noise = sample_noise(GAUSS, GRID, 0.01, 4)
    p_bad = MultiPoly({(1,): 1.0}, 1)  # vanishes at the origin
    with pytest.raises(ZeroOnAxis) as err:
        solve_linear(p_bad, Q1, noise)
    assert err.value.frequency == (0.0,)


def test_zero_mean_gauge():
    noise = sample_noise(GAUSS, GRID, 0.01, 4)
    p_bad = MultiPoly({(1,): 1.0}, 1)
    s = solve_linear(p_bad, Q1, noise, zero_mean_gauge=True)
    s_hat = dft(s).values
    assert abs(s_hat[0]) <= 1e-10
    xi = GRID.freq_axes()[0]
    w_hat = dft(noise.density_field()).values
    nz = xi != 0.0
    assert np.allclose(s_hat[nz] * (1j * xi[nz]), w_hat[nz], rtol=1e-10, atol=1e-12)


def test_solution_map_linear_in_noise():
    n1 = sample_noise(GAUSS, GRID, 0.01, 10)
    n2 = sample_noise(GAUSS, GRID, 0.01, 11)
    combined = n1.cell_integrals + n2.cell_integrals
    from lspde import NoiseRealization

    n12 = NoiseRealization(GRID, combined, 0, GAUSS, 0.01)
    s12 = solve_linear(P1, Q1, n12)
    s1 = solve_linear(P1, Q1, n1)
    s2 = solve_linear(P1, Q1, n2)
    assert np.max(np.abs(s12.values - s1.values - s2.values)) <= 1e-12 * np.max(
        np.abs(s12.values)
    )


def test_shift_equivariance_on_lattice():
    from lspde import rolled

    noise = sample_noise(GAUSS, GRID, 0.01, 12)
    shift = (13,)
    s_then_shift = rolled(solve_linear(P1, Q1, noise), shift).values
    shift_then_s = solve_linear(P1, Q1, noise.shifted(shift)).values
    assert np.max(np.abs(s_then_shift - shift_then_s)) <= 1e-12 * np.max(np.abs(s_then_shift))


def test_minimal_grid_pipeline():
    grid = Grid((4,), (2.0,))
    noise = sample_noise(GAUSS, grid, 0.01, 13)
    s = solve_linear(P1, Q1, noise)
    assert spectral_residual(P1, Q1, noise, s) <= 1e-10


def test_three_dimensional_solve():
    grid = Grid((8, 8, 8), (4.0, 4.0, 4.0))
    p = MultiPoly.helmholtz(1.0, 1, 3)
    q = MultiPoly.constant(1.0, 3)
    noise = sample_noise(GAUSS, grid, 0.01, 77)
    s = solve_linear(p, q, noise)
    assert s.values.shape == (8, 8, 8)
    assert spectral_residual(p, q, noise, s) <= 1e-10
    assert s.max_imag <= 1e-9 * np.max(np.abs(s.values.real))
    back = idft(dft(s))
    assert np.max(np.abs(back.values - s.values)) <= 1e-12 * np.max(np.abs(s.values))


# ---------------------------------------------------------------------- #
# second-order structure
# ---------------------------------------------------------------------- #


def test_gaussian_variance_spectrum():
    spec = variance_spectrum(P1, Q1, GAUSS, GRID, 2000, seed=0)
    xi = GRID.freq_axes()[0]
    sel = np.abs(xi) <= 8.0
    rel = np.abs(spec.empirical[sel] - spec.theoretical[sel]) / spec.theoretical[sel]
    assert np.max(rel) <= 0.10
    assert np.allclose(spec.theoretical, 1.0 / (1.0 + xi**2) ** 2)


def test_jump_noise_variance_spectrum():
    # flat level is the second moment of the jumps: 4 for a unit atom at 2
    triplet = LevyTriplet(0.0, 0.0, LevyMeasure.atom(2.0))
    spec = variance_spectrum(P1, Q1, triplet, GRID, 2000, seed=5)
    xi = GRID.freq_axes()[0]
    sel = np.abs(xi) <= 8.0
    rel = np.abs(spec.empirical[sel] - spec.theoretical[sel]) / spec.theoretical[sel]
    assert np.allclose(spec.theoretical, 4.0 / (1.0 + xi**2) ** 2)
    assert np.max(rel) <= 0.15


def test_stationarity_two_dimensional_shifts():
    grid = Grid((16, 16), (6.4, 6.4))
    p = MultiPoly.helmholtz(1.0, 1, 2)
    q = MultiPoly.constant(1.0, 2)
    report = stationarity_test(p, q, GAUSS, grid, [(3, 5), (8, 0)], 400, seed=2)
    assert report.p_values.shape == (2, 5)
    assert report.passed()


def test_variance_spectrum_csv(tmp_path):
    spec = variance_spectrum(P1, Q1, GAUSS, GRID, 50, seed=0)
    path = tmp_path / "spec.csv"
    spec.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "xi1,empirical,theoretical"
    assert len(lines) == 1 + GRID.size


# ---------------------------------------------------------------------- #
# regularity gain across blocks
# ---------------------------------------------------------------------- #


def test_block_energy_slope_gain():
    part = make_partition()
    grid = Grid((512,), (4.0 * math.pi,))
    params = BesovParams(0.0, 2.0, 2.0, 0.0)
    sampler = LevyNoiseSampler(GAUSS, grid, 0.01)
    p = MultiPoly.helmholtz(1.0, 1, 1)
    acc_noise = acc_sol = None
    reps = 60
    for i in range(reps):
        noise = sampler.sample(300 + i)
        w = noise.density_field()
        s = solve_linear(p, Q1, noise)
        en = np.array([b.value for b in besov_profile(w, params, part)]) ** 2
        es = np.array([b.value for b in besov_profile(s, params, part)]) ** 2
        acc_noise = en if acc_noise is None else acc_noise + en
        acc_sol = es if acc_sol is None else acc_sol + es
    K = part.max_block(grid)
    ks = np.arange(2, K)
    slope_noise = np.polyfit(ks, np.log(acc_noise[ks] / reps), 1)[0]
    slope_sol = np.polyfit(ks, np.log(acc_sol[ks] / reps), 1)[0]
    target = 2.0 * 2.0 * math.log(2.0)  # decay order 2 for the shifted laplacian
    assert slope_noise - slope_sol == pytest.approx(target, rel=0.15)


# ---------------------------------------------------------------------- #
# stationarity
# ---------------------------------------------------------------------- #


def test_stationarity_zero_noise_degenerate():
    zero = LevyTriplet(0.0, 0.0, LevyMeasure.zero())
    report = stationarity_test(P1, Q1, zero, GRID, [(5,)], 50, seed=0)
    assert report.passed()
    assert np.all(report.statistics == 0.0)


def test_stationarity_gaussian_passes():
    report = stationarity_test(P1, Q1, GAUSS, GRID, [(7,), (32,)], 1000, seed=0)
    for row in report.p_values:
        assert np.count_nonzero(row > 0.01) >= 4
    assert report.passed()


def test_stationarity_negative_control():
    """A deterministic ramp added to one batch must break the shift test."""
    battery = bump_battery(GRID)
    sampler = LevyNoiseSampler(GAUSS, GRID, 0.01)
    mult = RationalMultiplier(Q1, P1)
    symbol = mult.symbol(GRID.freq_mesh())
    ramp = np.linspace(0.0, 3.0, GRID.size).reshape(GRID.shape)

    def projections(seed0, add_ramp, shift):
        out = np.empty((600, len(battery)))
        for i in range(600):
            noise = sampler.sample(seed0 + i)
            s = idft(Field(GRID, symbol * dft(noise.density_field()).values, "spectral")).values.real
            if add_ramp:
                s = s + ramp
            s = np.roll(s, shift)
            for j, phi in enumerate(battery):
                out[i, j] = np.sum(s * phi.values.real) * GRID.cell_volume
        return out

    base = projections(0, False, 0)
    shifted_ramped = projections(600, True, 20)
    pvals = [ks_2samp(base[:, j], shifted_ramped[:, j]).pvalue for j in range(len(battery))]
    assert min(pvals) < 0.01


def test_stationarity_csv(tmp_path):
    report = stationarity_test(P1, Q1, GAUSS, GRID, [(3,)], 40, seed=1)
    path = tmp_path / "ks.csv"
    report.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "shift,testfn,ks_statistic,p_value"
    assert len(lines) == 1 + 5
