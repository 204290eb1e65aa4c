"""Oscillatory quadrature, derivative-lower-bound checks, dispersive kernels.

The workhorse integrates amp(x) * exp(i*phase(x)) over a finite interval by
panel Gauss-Legendre, with panel boundaries equidistributed in the cumulative
phase variation so each panel holds a bounded number of oscillations; zeros
of phase' (stationary points) are inserted as panel edges.  Accuracy is
certified by doubling the panel count until successive estimates agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .errors import PreconditionError, QuadratureError
from .field import chi_band
from .symbols import DyadicBand, SymbolSpec, suggest_exponents

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_MAX_DOUBLINGS = 12
_FINE = 4097  # samples used for phase-variation and edge placement


def _panel_edges(phase, a: float, b: float, n_panels: int) -> np.ndarray:
    x = np.linspace(a, b, _FINE)
    p = np.asarray(phase(x), dtype=float)
    dp = np.abs(np.gradient(p, x))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dp[1:] + dp[:-1]) * np.diff(x))])
    total = cum[-1]
    if total == 0.0:
        return np.linspace(a, b, n_panels + 1)
    targets = np.linspace(0.0, total, n_panels + 1)
    edges = np.interp(targets, cum, x)
    # keep panels from degenerating where the phase is nearly flat
    uniform = np.linspace(a, b, max(9, n_panels // 4 + 1))
    # split at stationary points of the phase
    dps = np.gradient(p, x)
    flips = x[1:][np.sign(dps[1:]) * np.sign(dps[:-1]) < 0]
    edges = np.unique(np.concatenate([edges, uniform, flips]))
    return edges


def _gauss_eval(phase, amplitude, edges: np.ndarray) -> complex:
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    vals = np.asarray(amplitude(nodes), dtype=complex) * np.exp(1j * np.asarray(phase(nodes), dtype=float))
    return complex(np.sum(w * vals))


def oscillatory_integral(phase, amplitude, interval, tol: float = 1e-10,
                         return_info: bool = False):
    """Integral of amplitude(x) * exp(i*phase(x)) over [a, b].

    phase and amplitude must accept ndarray arguments.  The result is
    accepted once doubling the panel count moves the value by at most
    tol/4, so a further 4x refinement stays within tol.  Raises
    QuadratureError when the doubling cascade stalls.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (b > a):
        raise QuadratureError(f"empty interval [{a}, {b}]")
    if tol < 1e-12:
        raise QuadratureError("tolerances below 1e-12 are not certifiable here")
    x = np.linspace(a, b, _FINE)
    p = np.asarray(phase(x), dtype=float)
    dp = np.abs(np.gradient(p, x))
    variation = np.trapezoid(dp, x)
    n0 = max(8, int(variation / (2.0 * np.pi)) + 1)
    prev = None
    n = n0
    for _ in range(_MAX_DOUBLINGS):
        edges = _panel_edges(phase, a, b, n)
        val = _gauss_eval(phase, amplitude, edges)
        if prev is not None and abs(val - prev) <= tol / 4.0:
            if return_info:
                return val, {"panels": len(edges) - 1, "est_error": abs(val - prev)}
            return val
        prev = val
        n *= 2
    raise QuadratureError(
        f"refinement stalled before tol={tol:g} on [{a}, {b}] "
        f"(last change {abs(val - prev):.3e})"
    )


# ---------------------------------------------------------------------------
# Derivative-lower-bound (van der Corput) ratio checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VdcReport:
    k_order: int
    lambdas: np.ndarray
    values: np.ndarray
    bound_factor: float
    ratios: np.ndarray

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())


def _sampled_derivative(f, a, b, order, n=2049):
    x = np.linspace(a, b, n)
    v = np.asarray(f(x), dtype=float)
    d = v
    for _ in range(order):
        d = np.gradient(d, x)
    return x, d


def vdc_check(phase, amplitude, interval, k_order: int, lambdas,
              tol: float = 1e-10) -> VdcReport:
    """Oscillation bound check: |int e^{i*lam*phase} amp| vs lam^{-1/k}.

    Requires |phase^(k)| >= 1 on the interval (checked on a grid, with a
    tiny slack for the sampling), and for k_order = 1 a monotonic phase'.
    The returned ratios divide the measured integral by
    lam^{-1/k} * (|amp(b)| + int |amp'|); boundedness across the sweep is
    the caller's assertion.
    """
    if k_order not in (1, 2):
        raise PreconditionError("k_order must be 1 or 2")
    a, b = float(interval[0]), float(interval[1])
    x, dk = _sampled_derivative(phase, a, b, k_order)
    inner = slice(4, -4)  # gradient endpoints are one-sided, skip them
    if np.min(np.abs(dk[inner])) < 1.0 - 1e-6:
        raise PreconditionError(
            f"|phase^({k_order})| >= 1 fails on the interval "
            f"(min {np.min(np.abs(dk[inner])):.6f})"
        )
    if k_order == 1:
        _, d2 = _sampled_derivative(phase, a, b, 2)
        if np.min(d2[inner]) < -1e-9 and np.max(d2[inner]) > 1e-9:
            raise PreconditionError("phase' must be monotonic for k_order = 1")
    xa, da = _sampled_derivative(amplitude, a, b, 1)
    amp_b = float(np.abs(np.asarray(amplitude(np.array([b])))[0]))
    bound = amp_b + float(np.trapezoid(np.abs(da), xa))
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.array(
        [
            abs(oscillatory_integral(lambda t, L=lam: L * np.asarray(phase(t)),
                                     amplitude, (a, b), tol))
            for lam in lambdas
        ]
    )
    ratios = values / (lambdas ** (-1.0 / k_order) * bound)
    return VdcReport(k_order, lambdas, values, bound, ratios)


# ---------------------------------------------------------------------------
# Dispersive kernel of one dyadic band
# ---------------------------------------------------------------------------

CHI0_SUPPORT = (0.625, 1.6)


def chi0_squared(rho: np.ndarray) -> np.ndarray:
    c = chi_band(rho, 0)
    return c * c


def kernel_K(spec: SymbolSpec, k: int, t: float, x: float,
             tol: float = 1e-10) -> complex:
    """K(t,x) = int exp(i*(t*omega(2^k rho) + x*rho)) * chi0(rho)^2 drho."""
    scale = 2.0**k

    def phase(rho):
        return t * spec.omega(scale * rho) + x * rho

    return oscillatory_integral(phase, chi0_squared, CHI0_SUPPORT, tol)


@dataclass(frozen=True)
class DecayScan:
    k: int
    t: np.ndarray
    sup_stationary: np.ndarray
    sup_far: np.ndarray
    slope_stationary: float
    ci_stationary: float
    slope_far: float
    ci_far: float


def _fit_slope(t: np.ndarray, vals: np.ndarray, floor: float = 0.0) -> tuple[float, float]:
    keep = vals > floor
    if keep.sum() < 4:
        raise QuadratureError("fewer than 4 usable points for the decay fit")
    res = linregress(np.log(t[keep]), np.log(vals[keep]))
    return float(res.slope), float(2.0 * res.stderr)


def kernel_decay_scan(spec: SymbolSpec, k: int, t_list,
                      alpha: float | None = None,
                      tol: float = 1e-12) -> DecayScan:
    """Fit sup_x |K(t, x)| decay in two x-windows.

    Stationary window: x = -t*2^k*omega'(2^k rho*) for rho* near the band
    center, which parks the phase-critical point inside the amplitude
    support.  Far window: |x| <= t*2^{k*alpha}/100, where the phase
    derivative never vanishes and repeated integration by parts applies.
    Kernel values that fall below 100x the quadrature tolerance are noise
    and are dropped from the fits; fewer than 4 usable points is an error.
    """
    t_arr = np.asarray(sorted(t_list), dtype=float)
    if len(t_arr) < 8:
        raise QuadratureError("need a geometric t grid with >= 8 points")
    if alpha is None:
        alpha, _ = suggest_exponents(spec, DyadicBand(k))
    scale = 2.0**k
    sup_st = np.empty(len(t_arr))
    sup_far = np.empty(len(t_arr))
    for i, t in enumerate(t_arr):
        xs = [-t * scale * float(spec.omega1(scale * rs)) for rs in (0.8, 1.0, 1.25)]
        sup_st[i] = max(abs(kernel_K(spec, k, t, x, tol)) for x in xs)
        xfar = t * 2.0 ** (k * alpha) / 100.0
        sup_far[i] = max(
            abs(kernel_K(spec, k, t, x, tol)) for x in (0.0, 0.5 * xfar, xfar)
        )
    floor = 100.0 * tol
    s_st, ci_st = _fit_slope(t_arr, sup_st, floor)
    s_far, ci_far = _fit_slope(t_arr, sup_far, floor)
    return DecayScan(k, t_arr, sup_st, sup_far, s_st, ci_st, s_far, ci_far)
