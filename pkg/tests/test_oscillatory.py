"""Tests for the oscillatory quadrature and dispersive-kernel scans."""

import numpy as np
import pytest
from scipy.special import fresnel

from gplab.errors import PreconditionError, QuadratureError
from gplab.oscillatory import (
    DecayScan,
    kernel_K,
    kernel_decay_scan,
    oscillatory_integral,
    vdc_check,
)
from gplab.symbols import catalog_lookup

ONES = lambda x: np.ones_like(x)  # noqa: E731

# Frozen: scipy.integrate.quad of chi0(x)^2 over [5/8, 8/5]
CHI0_SQ_INTEGRAL = 0.6629952577064092


def _fresnel_exact(lam: float) -> complex:
    s, c = fresnel(np.sqrt(2.0 * lam / np.pi))
    return np.sqrt(np.pi / (2.0 * lam)) * (c + 1j * s)


def test_unit_integral():
    val = oscillatory_integral(lambda x: np.zeros_like(x), ONES, (0, 1), 1e-12)
    assert val == pytest.approx(1.0, abs=1e-13)


def test_fresnel_oracle():
    # quadratic phase at lambda = 100 against the closed form; the closed
    # form itself is pinned by a dense brute-force Riemann oracle
    lam = 100.0
    xs = np.linspace(0, 1, 2_000_001)
    brute = np.trapezoid(np.exp(1j * lam * xs**2), xs)
    assert abs(brute - _fresnel_exact(lam)) <= 1e-9
    for lam in (10.0, 100.0, 1e4):
        val = oscillatory_integral(lambda x, L=lam: L * x * x, ONES, (0, 1), 1e-10)
        assert abs(val - _fresnel_exact(lam)) <= 1e-8


def test_conjugation_symmetry():
    phase = lambda x: 40.0 * np.sin(3 * x) + 2 * x  # noqa: E731
    amp = lambda x: np.exp(-x)  # noqa: E731
    plus = oscillatory_integral(phase, amp, (0, 2), 1e-11)
    minus = oscillatory_integral(lambda x: -phase(x), amp, (0, 2), 1e-11)
    assert abs(minus - np.conj(plus)) <= 1e-10


def test_tolerance_self_consistency():
    phase = lambda x: 300.0 * x * x  # noqa: E731
    coarse = oscillatory_integral(phase, ONES, (0, 1), 1e-8)
    fine = oscillatory_integral(phase, ONES, (0, 1), 5e-9)
    assert abs(coarse - fine) <= 1e-8


def test_quadrature_guards():
    with pytest.raises(QuadratureError):
        oscillatory_integral(lambda x: x, ONES, (1, 1), 1e-10)
    with pytest.raises(QuadratureError):
        oscillatory_integral(lambda x: x, ONES, (0, 1), 1e-13)
    # amplitude oscillating at every scale near 0 stalls the refinement
    with pytest.raises(QuadratureError):
        oscillatory_integral(
            lambda x: np.zeros_like(x),
            lambda x: np.sin(1.0 / (x + 1e-300)),
            (0, 1),
            1e-10,
        )


def test_vdc_linear_phase_closed_form():
    lambdas = np.logspace(1, 4, 7)
    rep = vdc_check(lambda x: x, ONES, (0, 1), 1, lambdas)
    # amplitude 1: bound factor is |amp(1)| + 0, measured is |e^{i lam}-1|/lam
    assert rep.bound_factor == pytest.approx(1.0, abs=1e-9)
    exact = np.abs(np.exp(1j * lambdas) - 1.0) / lambdas
    assert np.allclose(rep.values, exact, atol=1e-8)
    assert rep.max_ratio <= 2.0


def test_vdc_quadratic_phase_bounded():
    lambdas = np.logspace(1, 4, 7)
    rep = vdc_check(lambda x: x * x, lambda x: 1.0 - x / 2.0, (0.0, 1.0), 2, lambdas)
    assert rep.max_ratio <= 4.0
    assert np.isfinite(rep.ratios).all()


def test_vdc_gp_kernel_phase_bounded():
    # the band-0 dispersion phase, normalized to unit second derivative
    gp = catalog_lookup("gp")
    lo, hi = 0.625, 1.6
    w2min = float(np.min(gp.omega2(np.linspace(lo, hi, 512))))
    phase = lambda x: gp.omega(x) / w2min  # noqa: E731
    rep = vdc_check(phase, ONES, (lo, hi), 2, np.logspace(1, 4, 7))
    assert rep.max_ratio <= 4.0


def test_vdc_degenerate_phase_rejected():
    with pytest.raises(PreconditionError):
        vdc_check(lambda x: x**3, ONES, (-1, 1), 2, [10.0])
    with pytest.raises(PreconditionError):
        # phase' = 3x^2 is not monotonic on [-1, 1]
        vdc_check(lambda x: x**3 + 2.0 * x, ONES, (-1, 1), 1, [10.0])
    with pytest.raises(PreconditionError):
        vdc_check(lambda x: x, ONES, (0, 1), 3, [10.0])


def test_kernel_at_origin_matches_quadrature_oracle():
    gp = catalog_lookup("gp")
    val = kernel_K(gp, 2, 0.0, 0.0)
    assert val.imag == pytest.approx(0.0, abs=1e-12)
    assert val.real == pytest.approx(CHI0_SQ_INTEGRAL, abs=1e-8)
    assert val.real > 0


def test_kernel_conjugation_symmetry():
    gp = catalog_lookup("gp")
    for (k, t, x) in [(2, 7.0, -3.0), (-3, 15.0, 2.0), (0, 3.0, 0.5)]:
        assert abs(kernel_K(gp, k, -t, -x) - np.conj(kernel_K(gp, k, t, x))) <= 1e-9


def test_kernel_stationary_bound_gp_band2():
    # sup_x |K| * sqrt(t) * 2^{k*beta/2} stays bounded in the dispersive
    # regime of the band (beta = 2 for k >= 0)
    gp = catalog_lookup("gp")
    k, beta = 2, 2.0
    worst = 0.0
    for t in np.logspace(1, 3, 5):
        xs = [-t * 2.0**k * float(gp.omega1(2.0**k * rs)) for rs in (0.8, 1.0, 1.25)]
        sup = max(abs(kernel_K(gp, k, t, x, 1e-9)) for x in xs)
        worst = max(worst, sup * np.sqrt(t) * 2.0 ** (k * beta / 2.0))
    assert 0.1 <= worst <= 10.0


def test_decay_scan_gp_band2():
    gp = catalog_lookup("gp")
    scan = kernel_decay_scan(gp, 2, np.logspace(1, 3, 16), alpha=2.0)
    assert isinstance(scan, DecayScan)
    assert scan.slope_stationary == pytest.approx(-0.5, abs=0.15)
    assert scan.slope_far <= -1.8


def test_decay_scan_schrodinger_quadratic():
    # omega = r^2: the kernel is an exact Fresnel-type integral whose
    # stationary decay is t^{-1/2} on the nose
    sch = catalog_lookup("schrodinger", [2])
    scan = kernel_decay_scan(sch, 2, np.logspace(1, 3, 16), alpha=2.0)
    assert scan.slope_stationary == pytest.approx(-0.5, abs=0.05)


def test_decay_scan_needs_enough_points():
    gp = catalog_lookup("gp")
    with pytest.raises(QuadratureError):
        kernel_decay_scan(gp, 2, np.logspace(1, 3, 5))
