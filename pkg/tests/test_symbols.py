"""Tests for the dispersion-relation catalog and band classifier."""

import mpmath as mp
import numpy as np
import pytest

from gplab.errors import DegenerateBandError, DomainError
from gplab.symbols import (
    DyadicBand,
    SymbolSpec,
    catalog_lookup,
    classify_band,
    stated_exponents,
    suggest_exponents,
)

# Catalog dispersion relations re-stated independently for the
# finite-difference oracle (high-precision arithmetic sidesteps the
# float64 cancellation that third differences suffer at r ~ 2^10).
_MP_OMEGA = {
    ("gp", ()): lambda r: r * mp.sqrt(2 + r**2),
    ("schrodinger", (0.5,)): lambda r: r ** mp.mpf("0.5"),
    ("schrodinger", (1.0,)): lambda r: r,
    ("schrodinger", (2.0,)): lambda r: r**2,
    ("klein_gordon", ()): lambda r: mp.sqrt(1 + r**2),
    ("beam", ()): lambda r: mp.sqrt(1 + r**4),
    ("fourth_order", (0.0,)): lambda r: r**2,
    ("fourth_order", (0.1,)): lambda r: r**2 + mp.mpf("0.1") * r**4,
    ("fourth_order", (1.0,)): lambda r: r**2 + r**4,
}

ALL_ENTRIES = sorted(_MP_OMEGA)


def _fd_derivatives(f, r):
    """Centered differences of f at r, order 1..3, in 50-digit arithmetic."""
    with mp.workdps(50):
        r = mp.mpf(r)
        h = r * mp.mpf("1e-8")
        d1 = (f(r + h) - f(r - h)) / (2 * h)
        d2 = (f(r + h) - 2 * f(r) + f(r - h)) / h**2
        d3 = (f(r + 2 * h) - 2 * f(r + h) + 2 * f(r - h) - f(r - 2 * h)) / (2 * h**3)
        return float(d1), float(d2), float(d3)


@pytest.mark.parametrize("name,params", ALL_ENTRIES)
def test_derivatives_match_finite_differences(name, params):
    spec = catalog_lookup(name, params)
    f = _MP_OMEGA[(name, params)]
    for r in np.logspace(-10, 10, 21, base=2.0):
        d1, d2, d3 = _fd_derivatives(f, r)
        w = np.array([spec.omega(r), spec.omega1(r), spec.omega2(r), spec.omega3(r)])
        assert np.all(np.isfinite(w))
        for j, (got, ref) in enumerate(((w[1], d1), (w[2], d2), (w[3], d3)), start=1):
            # absolute floor: FD truncation residue where the true
            # derivative vanishes, scaled by the function size
            floor = 1e-13 * abs(w[0]) / r**j
            assert abs(got - ref) <= 1e-6 * abs(ref) + floor, (r, j, got, ref)


def test_catalog_closed_form_values():
    gp = catalog_lookup("gp")
    # omega'(r) -> sqrt(2) as r -> 0+
    assert gp.omega1(1e-9) == pytest.approx(np.sqrt(2.0), rel=1e-12)
    sch = catalog_lookup("schrodinger", [2])
    r = np.linspace(0.1, 7, 40)
    assert np.allclose(sch.omega(r), r**2)
    assert np.allclose(sch.omega2(r), 2.0)
    kg = catalog_lookup("klein_gordon")
    assert kg.omega(1.0) == pytest.approx(np.sqrt(2.0), rel=1e-12)
    assert kg.omega1(1.0) == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)


def test_catalog_errors():
    with pytest.raises(DomainError):
        catalog_lookup("airy")
    with pytest.raises(DomainError):
        catalog_lookup("schrodinger", [-2.0])
    with pytest.raises(DomainError):
        catalog_lookup("schrodinger", [])
    with pytest.raises(DomainError):
        catalog_lookup("fourth_order", [-0.1])
    with pytest.raises(DomainError):
        catalog_lookup("gp", [1.0])


@pytest.mark.parametrize("name,params", ALL_ENTRIES)
def test_classification_reproduces_stated_flags(name, params):
    spec = catalog_lookup(name, params)
    for k in range(-8, 9):
        alpha, beta, h2_expected, h3_expected = stated_exponents(spec, k)
        beta_cand = alpha if beta is None else beta
        cls = classify_band(spec, DyadicBand(k), alpha, beta_cand)
        assert cls.h1, (name, params, k)
        assert cls.h2 == h2_expected, (name, params, k, cls)
        assert cls.h3 == h3_expected, (name, params, k, cls)
        # h2 implies h1, and h2 implies the exponent-order constraint
        assert (not cls.h2) or cls.h1
        if cls.h2:
            assert k * (cls.alpha - cls.beta) >= 0


def test_gp_band_examples():
    gp = catalog_lookup("gp")
    c = classify_band(gp, DyadicBand(3), 2.0, 2.0)
    assert c.h1 and c.h2 and c.h3
    c = classify_band(gp, DyadicBand(-4), 1.0, 3.0)
    assert c.h1 and c.h2 and c.h3
    kg = catalog_lookup("klein_gordon")
    c = classify_band(kg, DyadicBand(2), 1.0, -1.0)
    assert c.h2 and c.h3


def test_wrong_exponent_guess_rejected_far_from_zero():
    # overstating alpha by a full unit at k = 8 must fail the lower bound
    gp = catalog_lookup("gp")
    good = classify_band(gp, DyadicBand(8), 2.0, 2.0)
    bad = classify_band(gp, DyadicBand(8), 3.0, 2.0)
    assert good.h1 and not bad.h1
    assert bad.c_lower_1 <= good.c_lower_1 / 2.0 ** (8 / 2)


def test_classification_validation():
    gp = catalog_lookup("gp")
    with pytest.raises(DomainError):
        classify_band(gp, DyadicBand(0), 2.0, 2.0, grid_points=32)
    with pytest.raises(DomainError):
        classify_band(gp, DyadicBand(0), np.nan, 2.0)
    singular = SymbolSpec(
        "singular", (),
        omega=lambda r: 1.0 / (r - 1.0),
        omega1=lambda r: -1.0 / (r - 1.0) ** 2,
        omega2=lambda r: 2.0 / (r - 1.0) ** 3,
        omega3=lambda r: -6.0 / (r - 1.0) ** 4,
    )
    with pytest.raises(DomainError):
        classify_band(singular, DyadicBand(0), 1.0, 1.0, grid_points=65)


def test_suggest_exponents_examples():
    beam = catalog_lookup("beam")
    assert suggest_exponents(beam, DyadicBand(4)) == (2.0, 2.0)
    assert suggest_exponents(beam, DyadicBand(-4)) == (4.0, 4.0)
    sch1 = catalog_lookup("schrodinger", [1])
    alpha, beta = suggest_exponents(sch1, DyadicBand(0))
    assert alpha == 1.0 and beta is None  # no curvature bound attainable
    c = classify_band(sch1, DyadicBand(0), 1.0, 1.0)
    assert c.h1 and not c.h2


@pytest.mark.parametrize("name,params", ALL_ENTRIES)
def test_suggested_exponents_pass_classification(name, params):
    spec = catalog_lookup(name, params)
    for k in range(-8, 9):
        try:
            alpha, beta = suggest_exponents(spec, DyadicBand(k))
        except DegenerateBandError:
            continue
        cand = alpha if beta is None else beta
        cls = classify_band(spec, DyadicBand(k), alpha, cand)
        assert cls.h1, (name, params, k, cls)
        if beta is not None:
            assert cls.h2, (name, params, k, cls)


def test_beam_third_derivative_sign_change_detected():
    beam = catalog_lookup("beam")
    c = classify_band(beam, DyadicBand(0), 2.0, 2.0)
    assert c.sign_changes_omega3 == 1  # omega''' flips sign at r = 1
    c = classify_band(beam, DyadicBand(4), 2.0, 2.0)
    assert c.sign_changes_omega3 == 0
