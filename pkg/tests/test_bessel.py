"""Tests for Bessel evaluation, envelopes, and asymptotic decomposition."""

import numpy as np
import pytest
from scipy.special import jv, jvp

from gplab.bessel import (
    AsymptoticDecomp,
    bessel_asymptotic_decomp,
    bessel_j,
    bessel_j_derivative,
    bessel_uniform_decay_check,
    remainder_envelope,
    uniform_decay_envelope,
)
from gplab.errors import DomainError


def test_j0_at_origin():
    assert bessel_j(0.0, 0.0).value == 1.0
    assert bessel_j(2.0, 0.0).value == 0.0


def test_half_integer_closed_form():
    for r in (1.0, 10.0, 100.0):
        exact = np.sqrt(2.0 / (np.pi * r)) * np.sin(r)
        assert bessel_j(0.5, r).value == pytest.approx(exact, abs=1e-10)


def test_dual_method_agreement():
    for nu, r in [(5.0, 12.0), (2.0, 15.0), (0.0, 20.0), (30.0, 18.0), (0.5, 11.0)]:
        a = bessel_j(nu, r, method="series").value
        b = bessel_j(nu, r, method="schlafli").value
        assert abs(a - b) <= 1e-9, (nu, r)


@pytest.mark.parametrize(
    "nu,r",
    [(0.0, 0.5), (1.0, 3.0), (5.0, 12.0), (0.5, 100.0), (20.0, 100.0),
     (50.0, 26.0), (11.0, 30.0), (200.0, 90.0), (3.5, 800.0), (7.0, 1e4)],
)
def test_against_library_oracle(nu, r):
    got = bessel_j(nu, r).value
    assert abs(got - jv(nu, r)) <= 1e-10 * max(1.0, abs(jv(nu, r)))


def test_derivative_recurrence():
    for nu, r in [(0.5, 7.0), (11.0, 50.0), (50.0, 120.0), (0.0, 2.0)]:
        assert bessel_j_derivative(nu, r) == pytest.approx(jvp(nu, r), abs=1e-10)


def test_domain_guards():
    with pytest.raises(DomainError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_j(300.0, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, 2e5)
    with pytest.raises(DomainError):
        bessel_j(1.0, 0.0, method="schlafli")
    with pytest.raises(DomainError):
        bessel_j(1.0, 1.0, method="airy")
    with pytest.raises(DomainError):
        bessel_j_derivative(1.0, 0.0)


def test_uniform_decay_envelope_sweep():
    rep = bessel_uniform_decay_check([0.5, 5.0, 11.0, 50.0], np.logspace(0, 4, 48))
    assert rep.sup_ratio <= 3.0
    assert all(v > 0 for v in rep.per_nu.values())


def test_turning_point_ratio_finite():
    nu = 50.0
    env = float(uniform_decay_envelope(nu, nu))
    assert env == pytest.approx(nu ** (-1.0 / 3.0), rel=1e-12)
    num = abs(bessel_j(nu, nu).value) + abs(bessel_j_derivative(nu, nu))
    assert np.isfinite(num / env)
    assert num / env <= 3.0


def test_classical_amplitude_tail():
    # |J_nu(r)| <= 3 r^{-1/2} for r >= 2*nu across the catalog orders
    for nu in (0.5, 5.0, 11.0, 50.0):
        for r in np.logspace(np.log10(2 * nu + 1.0), 4, 16):
            assert abs(bessel_j(nu, r).value) <= 3.0 / np.sqrt(r)


def test_asymptotic_decomp_far_field():
    d = bessel_asymptotic_decomp(20.0, 100.0)
    assert isinstance(d, AsymptoticDecomp)
    assert remainder_envelope(20.0, 100.0) == pytest.approx(1.0 / 100.0)
    assert abs(d.h) <= 5.0 / 100.0
    assert d.ratio <= 5.0


def test_asymptotic_decomp_near_turning_point():
    nu = 50.0
    r = nu + 2.0 * nu ** (1.0 / 3.0)
    d = bessel_asymptotic_decomp(nu, r)
    assert abs(d.h) <= 5.0 * (nu**2 / (r**2 - nu**2) ** 1.75 + 1.0 / r)
    assert d.ratio <= 5.0


def test_asymptotic_main_term_relative_accuracy():
    d = bessel_asymptotic_decomp(20.0, 500.0)
    assert abs(d.h) / abs(jv(20.0, 500.0)) <= 0.02


def test_asymptotic_domain_guards():
    with pytest.raises(DomainError):
        bessel_asymptotic_decomp(5.0, 100.0)
    with pytest.raises(DomainError):
        bessel_asymptotic_decomp(50.0, 50.0 + 0.5 * 50.0 ** (1.0 / 3.0))


def test_remainder_envelope_sweep():
    # |h| within 5x its envelope over a (nu, r) sweep past the turning point
    for nu in (11.0, 20.0, 50.0):
        lo = nu + 1.1 * nu ** (1.0 / 3.0)
        for r in np.logspace(np.log10(lo), np.log10(50 * nu), 10):
            d = bessel_asymptotic_decomp(nu, r)
            assert d.ratio <= 5.0, (nu, r, d.ratio)
