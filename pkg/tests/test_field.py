"""Tests for the radial spectral field layer."""

import numpy as np
import pytest

from gplab.errors import (
    BoundaryTailWarning,
    GridError,
    LowFrequencyAmplificationWarning,
)
from gplab.field import (
    FREQUENCY,
    PHYSICAL,
    NormSpec,
    RadialField,
    RadialGrid,
    apply_multiplier,
    chi_band,
    dealias,
    eta_bump,
    forward_transform,
    gaussian_field,
    inverse_transform,
    l2_norm,
    lebesgue_norm,
    make_field,
    mixed_spacetime_norm,
    multiplier_symbol,
    norm,
    radial_derivative,
    random_band_limited,
    read_snapshot,
    sobolev_norm,
    to_physical,
    write_snapshot,
    zero_field,
)

# Frozen from an independent quadrature oracle:
#   (4*pi/rho) * quad(exp(-r^2/2) sin(rho r) r, 0, 40)
GAUSSIAN_TRANSFORM_ORACLE = {
    0.25: 15.26504538943334,
    0.5: 13.898981994015575,
    1.0: 9.552621310595672,
    2.0: 2.1314779228705163,
    4.0: 0.005283405540831602,
}
# sqrt(4*pi * quad(exp(-r^2) r^2, 0, 40)) == pi**(3/4)
GAUSSIAN_L2_ORACLE = 2.359730492414697


@pytest.fixture(scope="module")
def grid():
    return RadialGrid(512, 24.0)


def test_grid_validation():
    with pytest.raises(GridError):
        RadialGrid(100, 10.0)  # not a power of two
    with pytest.raises(GridError):
        RadialGrid(32, 10.0)  # too small
    with pytest.raises(GridError):
        RadialGrid(64, -1.0)
    g = RadialGrid(64, 10.0)
    assert g.rho[0] > 0
    assert np.all(np.diff(g.r) > 0) and np.all(np.diff(g.rho) > 0)


def test_gaussian_transform_matches_quadrature_oracle(grid):
    # the frozen oracle pins the closed form used below
    for rho, expect in GAUSSIAN_TRANSFORM_ORACLE.items():
        assert (2 * np.pi) ** 1.5 * np.exp(-(rho**2) / 2) == pytest.approx(expect, rel=1e-9)
    fh = forward_transform(gaussian_field(grid))
    exact = (2 * np.pi) ** 1.5 * np.exp(-grid.rho**2 / 2)
    rel = np.linalg.norm(fh.data - exact) / np.linalg.norm(exact)
    assert rel <= 1e-8


def test_transform_of_zero_is_zero(grid):
    fh = forward_transform(zero_field(grid))
    assert np.all(fh.data == 0)


def test_real_profile_transforms_real(grid):
    rng = np.random.default_rng(0)
    f = random_band_limited(grid, rng, -2, 3)
    fh = forward_transform(f)
    assert np.abs(fh.data.imag).max() <= 1e-14 * np.abs(fh.data.real).max()


def test_round_trip_and_parseval(grid):
    rng = np.random.default_rng(1)
    vals = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    f = make_field(grid, vals)
    fh = forward_transform(f)
    back = inverse_transform(fh)
    assert np.linalg.norm(back.data - f.data) / np.linalg.norm(f.data) <= 1e-12
    assert l2_norm(f) == pytest.approx(l2_norm(fh), rel=1e-12)


def test_gaussian_l2_norm(grid):
    f = gaussian_field(grid)
    assert l2_norm(f) == pytest.approx(GAUSSIAN_L2_ORACLE, rel=1e-12)
    assert l2_norm(f) == pytest.approx(np.pi**0.75, rel=1e-12)


def test_multiplier_round_trip_on_band(grid):
    rng = np.random.default_rng(2)
    f = random_band_limited(grid, rng, 0, 0)
    fb = apply_multiplier(f, "P_k", k=0)
    out = apply_multiplier(apply_multiplier(fb, "U"), "U_inv")
    assert l2_norm(out - fb) <= 1e-12 * l2_norm(fb)


def test_one_minus_u_band_bound(grid):
    # 1 - rho/sqrt(2+rho^2) <= 1/rho^2 on rho >= 2^{k-1}, so the projected
    # field obeys ||(1-U) P_k f||_2 <= 2*2^{-2k} ||P_k f||_2 for k >= 3.
    rng = np.random.default_rng(3)
    f = random_band_limited(grid, rng, 3, 5)
    for k in (3, 4, 5):
        pf = apply_multiplier(f, "P_k", k=k)
        if l2_norm(pf) == 0:
            continue
        resid = pf - apply_multiplier(pf, "U")
        assert l2_norm(resid) <= 2.0 * 2.0 ** (-2 * k) * l2_norm(pf)


def test_projector_partition_of_unity(grid):
    rng = np.random.default_rng(4)
    # field supported well inside [2*rho_1, rho_n/2]
    f = random_band_limited(grid, rng, -1, 3)
    fh = forward_transform(f)
    mask = (grid.rho >= 2 * grid.rho[0]) & (grid.rho <= grid.rho[-1] / 2)
    data = np.where(mask, fh.data, 0.0)
    fh = fh.with_data(data)
    total = zero_field(grid, FREQUENCY)
    for k in range(-12, 8):
        total = total + apply_multiplier(fh, "P_k", k=k)
    assert l2_norm(total - fh) <= 1e-10 * l2_norm(fh)


def test_projector_almost_orthogonality(grid):
    rng = np.random.default_rng(5)
    f = forward_transform(random_band_limited(grid, rng, -2, 4))
    for k in (-1, 0, 2):
        for kp in (k + 2, k + 3):
            out = apply_multiplier(apply_multiplier(f, "P_k", k=k), "P_k", k=kp)
            assert l2_norm(out) == 0.0


def test_multipliers_commute(grid):
    rng = np.random.default_rng(6)
    f = forward_transform(random_band_limited(grid, rng, -2, 3))
    pairs = [("U", {}), ("H", {}), ("inv_2mD", {}), ("P_k", {"k": 1}),
             ("Hs_weight", {"s": 1.0}), ("D", {})]
    for name_a, kw_a in pairs:
        for name_b, kw_b in pairs:
            ab = apply_multiplier(apply_multiplier(f, name_a, **kw_a), name_b, **kw_b)
            ba = apply_multiplier(apply_multiplier(f, name_b, **kw_b), name_a, **kw_a)
            assert np.allclose(ab.data, ba.data, rtol=0, atol=1e-13 * (1 + np.abs(ab.data).max()))


def test_multiplier_monotonicity(grid):
    u = multiplier_symbol("U", grid.rho)
    h = multiplier_symbol("H", grid.rho)
    assert np.all((u > 0) & (u < 1))
    ratio = h / grid.rho
    assert np.all(ratio >= np.sqrt(2) - 1e-12)
    assert np.all(ratio <= np.sqrt(2 + grid.rho[-1] ** 2) + 1e-12)


def test_eta_and_chi_shapes():
    x = np.linspace(0, 3, 2000)
    e = eta_bump(x)
    assert np.all(e[x <= 1.25] == 1.0)
    assert np.all(e[x >= 1.6] == 0.0)
    assert np.all(np.diff(e) <= 1e-12)  # radially nonincreasing
    c = chi_band(x, 0)
    assert np.all(c >= -1e-15) and np.all(c <= 1.0 + 1e-15)
    assert np.all(c[x <= 0.625] == 0.0) and np.all(c[x >= 1.6] == 0.0)


def test_u_inv_low_frequency_flag():
    # grid whose lowest frequencies sit below the admissibility cut
    g = RadialGrid(512, 200.0)
    coeff = np.zeros(g.n, dtype=complex)
    coeff[:3] = 1.0  # all mass at the lowest frequencies -> flagged
    f = RadialField(g, FREQUENCY, coeff)
    with pytest.warns(LowFrequencyAmplificationWarning):
        out = apply_multiplier(f, "U_inv")
    assert np.all(np.isfinite(out.data))
    # band-limited field away from zero frequency: no flag
    rng = np.random.default_rng(7)
    fb = forward_transform(random_band_limited(g, rng, 1, 3))
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("error", LowFrequencyAmplificationWarning)
        apply_multiplier(fb, "U_inv")


def test_radial_derivative_gaussian(grid):
    f = gaussian_field(grid)
    d = radial_derivative(f)
    exact = -grid.r * np.exp(-grid.r**2 / 2)
    assert np.linalg.norm(d.data - exact) / np.linalg.norm(exact) <= 1e-12


def test_grad_mag_matches_derivative(grid):
    f = gaussian_field(grid)
    gm = apply_multiplier(f, "grad_mag")
    d = radial_derivative(f)
    assert np.allclose(gm.data, np.abs(d.data))


def test_dealias_zeroes_top_third(grid):
    rng = np.random.default_rng(8)
    f = make_field(grid, rng.standard_normal(grid.n))
    fh = forward_transform(dealias(f))
    cut = int(np.floor(2 * grid.n / 3))
    assert np.abs(fh.data[cut:]).max() <= 1e-13 * np.abs(fh.data).max()


def test_sobolev_norm_weights(grid):
    f = gaussian_field(grid)
    h1 = sobolev_norm(f, 1.0)
    dot_h1 = sobolev_norm(f, 1.0, homogeneous=True)
    l2 = l2_norm(f)
    # (2+rho^2)^{1/2} weight dominates both pieces
    assert h1 >= max(np.sqrt(2) * l2, dot_h1)
    assert h1 == pytest.approx(np.sqrt(2 * l2**2 + dot_h1**2), rel=1e-12)


def test_norm_spec_dispatch_and_validation(grid):
    f = gaussian_field(grid)
    assert norm(f, NormSpec("lebesgue_r", r=2)) == pytest.approx(l2_norm(f), rel=1e-12)
    # sup over grid nodes; r=0 is off the grid so the max sits at r_1
    assert norm(f, NormSpec("lebesgue_r", r=np.inf)) == pytest.approx(
        np.abs(f.data).max(), rel=1e-14
    )
    with pytest.raises(GridError):
        NormSpec("lebesgue_r")
    with pytest.raises(GridError):
        NormSpec("mixed_LqLr", q=2)
    with pytest.raises(GridError):
        NormSpec("nope")
    with pytest.raises(GridError):
        norm(f, NormSpec("mixed_LqLr", q=2, r=2))


def test_boundary_tail_warning():
    g = RadialGrid(64, 5.0)
    f = make_field(g, np.ones(g.n))
    with pytest.warns(BoundaryTailWarning):
        lebesgue_norm(f, 3)


def test_mixed_norm_constant_trajectory(grid):
    f = gaussian_field(grid)
    traj = [f] * 33
    got = mixed_spacetime_norm(traj, 2, 5, (0.0, 4.0))
    assert got == pytest.approx(2.0 * lebesgue_norm(f, 5), rel=1e-12)
    with pytest.raises(GridError):
        mixed_spacetime_norm([f] * 8, 2, 5, (0.0, 1.0))


def _free_trajectory(phi_hat, times):
    rho = phi_hat.grid.rho
    h = rho * np.sqrt(2 + rho**2)
    return [
        inverse_transform(phi_hat.with_data(np.exp(-1j * t * h) * phi_hat.data))
        for t in times
    ]


@pytest.mark.filterwarnings("ignore::gplab.errors.BoundaryTailWarning")
def test_free_evolution_unitarity(grid):
    rng = np.random.default_rng(9)
    phi = forward_transform(random_band_limited(grid, rng, 0, 2))
    phk = apply_multiplier(phi, "P_k", k=1)
    times = np.linspace(0, 3, 24)
    traj = _free_trajectory(phk, times)
    got = mixed_spacetime_norm(traj, np.inf, 2, (0, 3))
    assert got == pytest.approx(l2_norm(phk), rel=1e-12)
    # the sup-in-time L2 norm at every sample equals the initial one
    for f in traj[::6]:
        assert l2_norm(f) == pytest.approx(l2_norm(phk), rel=1e-12)


@pytest.mark.filterwarnings("ignore::gplab.errors.BoundaryTailWarning")
def test_free_evolution_mixed_norm_self_convergence():
    # (q,r)=(2,5) norm of a band-3 bump under the free flow is finite and
    # stable to < 2% when the time resolution doubles.
    g = RadialGrid(1024, 48.0)
    bump = np.exp(-((g.rho - 8.0) ** 2)) * chi_band(g.rho, 3)
    phi = RadialField(g, FREQUENCY, bump.astype(complex))
    vals = []
    for nt in (64, 128):
        times = np.linspace(0, 4.0, nt)
        traj = _free_trajectory(phi, times)
        vals.append(mixed_spacetime_norm(traj, 2, 5, (0, 4.0), times=times))
    assert vals[0] > 0
    assert abs(vals[1] - vals[0]) / vals[0] < 0.02


def test_snapshot_round_trip(tmp_path, grid):
    rng = np.random.default_rng(10)
    f = random_band_limited(grid, rng, -1, 2)
    p = tmp_path / "snap.fld"
    write_snapshot(p, f, t=1.5)
    back, t = read_snapshot(p)
    assert t == 1.5
    assert back.grid == f.grid and back.rep == f.rep
    assert np.array_equal(back.data, f.data)


def test_field_immutability_and_algebra(grid):
    f = gaussian_field(grid)
    with pytest.raises(ValueError):
        f.data[0] = 5.0
    h = 2.0 * f - f
    assert np.allclose(h.data, f.data)
    with pytest.raises(GridError):
        f + forward_transform(f)
    g2 = RadialGrid(64, 5.0)
    with pytest.raises(GridError):
        f + gaussian_field(g2)


def test_physical_frequency_guards(grid):
    f = gaussian_field(grid)
    with pytest.raises(GridError):
        inverse_transform(f)
    with pytest.raises(GridError):
        forward_transform(forward_transform(f))
    assert to_physical(forward_transform(f)).rep == PHYSICAL
