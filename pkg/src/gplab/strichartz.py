"""Dyadic mixed-norm constants for the half-wave flow: predicted vs measured.

Prediction side.  For a dispersion relation obeying the band lower bounds
with exponents (alpha, beta) on band k, the time-q space-r spherically
averaged estimate carries the dyadic constant 2^{k*theta} with

    theta(q, r) = d/2 - d/r - beta/q - (alpha-beta)*((d-1)/2 - (d-1)/r)

in the curvature regime 2/(2d-1) < q*(1/2 - 1/r) <= 1/(d-1) (with an extra
<k*(alpha-beta)>^{2/q} factor exactly on the border), and

    theta(q, r) = d/2 - d/r - alpha/q

in the first-order regime q*(1/2 - 1/r) > 1/(d-1).  Below the curvature
regime no estimate is predicted.  All regime arithmetic is exact
(fractions), and the d=3 specialization for the condensate symbol --
(alpha, beta) = (2, 2) for k >= 0 and (1, 3) for k < 0 -- is also written
out verbatim as a four-case law with the <k>^{2/q} 2^{k/4} border so the
two routes can be compared case by case.  Here <a> = (2 + a^2)^{1/2}.

Measurement side.  A fixed band-k profile (smooth indicator or Gaussian
bump) evolves under the exact free multiplier; the windowed L_t^q L_x^r
norm, normalized by the initial L^2 mass, is a lower-bound proxy for the
operator constant.  Absolute constants are not computable this way, so
scans compare fitted log2-slopes in k against theta and track the
measured/predicted ratio across each sweep.  Windows follow
T = 2^10 * 2^{-min(alpha*k, 2k)} (capped), and the truncated time tail is
estimated by extrapolating the fitted power law of the integrand.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import linregress

from .errors import GridError, RegimeError, WindowTruncationWarning
from .field import (
    FREQUENCY,
    RadialField,
    RadialGrid,
    chi_band,
    inverse_transform,
    l2_norm,
    lebesgue_norm,
)

INF = Fraction(10**9)  # exact stand-in for an infinite Lebesgue exponent
WINDOW_CAP = 1e4
N_MAX = 1 << 15


def _as_inv(x) -> Fraction:
    """1/x as an exact fraction; x may be inf (or the string 'inf')."""
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity"):
            return Fraction(0)
        x = Fraction(x)
    if x == np.inf:
        return Fraction(0)
    f = Fraction(x).limit_denominator(10**6)
    if f < 2:
        raise RegimeError(f"Lebesgue exponent must be >= 2 or inf, got {x}")
    return 1 / f


def _bracket(a) -> float:
    return float(np.sqrt(2.0 + float(a) ** 2))


@dataclass(frozen=True)
class StrichartzPrediction:
    k: int
    q: object
    r: object
    d: int
    regime: str
    theta: Fraction
    klog: bool          # k-dependent logarithmic correction present
    constant: float     # 2^{k*theta} including the bracket factor

    @property
    def log2_constant(self) -> float:
        return float(np.log2(self.constant))


def gp_band_exponents(k: int) -> tuple[Fraction, Fraction]:
    return (Fraction(2), Fraction(2)) if k >= 0 else (Fraction(1), Fraction(3))


def predict_general(k: int, q, r, d: int, alpha, beta) -> StrichartzPrediction:
    """The general band constant for exponents (alpha, beta) in dimension d."""
    iq, ir = _as_inv(q), _as_inv(r)
    alpha, beta = Fraction(alpha), Fraction(beta)
    half_gap = Fraction(1, 2) - ir
    if iq == 0 and ir == Fraction(1, 2):
        return StrichartzPrediction(k, q, r, d, "trivial", Fraction(0), False, 1.0)
    # s = q*(1/2 - 1/r) compared against 1/(d-1) and 2/(2d-1), cross-multiplied
    above_first = half_gap * (d - 1) > iq or (iq == 0 and half_gap > 0)
    on_border = half_gap * (d - 1) == iq and iq > 0
    above_curvature = half_gap * (2 * d - 1) > 2 * iq
    if above_first:
        theta = Fraction(d, 2) - d * ir - alpha * iq
        return StrichartzPrediction(k, q, r, d, "first_order", theta, False,
                                    float(2.0 ** (k * float(theta))))
    theta = Fraction(d, 2) - d * ir - beta * iq \
        - (alpha - beta) * (Fraction(d - 1, 2) - (d - 1) * ir)
    if on_border:
        const = 2.0 ** (k * float(theta)) * _bracket(k * (alpha - beta)) ** float(2 * iq)
        return StrichartzPrediction(k, q, r, d, "curvature_border", theta,
                                    alpha != beta, float(const))
    if above_curvature:
        return StrichartzPrediction(k, q, r, d, "curvature", theta, False,
                                    float(2.0 ** (k * float(theta))))
    raise RegimeError(
        f"(q, r) = ({q}, {r}) lies below the curvature regime in d={d}: "
        "no estimate predicted"
    )


def predict_gp(k: int, q, r) -> StrichartzPrediction:
    """The verbatim four-case d=3 law for the condensate dispersion."""
    iq, ir = _as_inv(q), _as_inv(r)
    if iq == 0 and ir == Fraction(1, 2):
        return StrichartzPrediction(k, q, r, 3, "trivial", Fraction(0), False, 1.0)
    if iq == 0:
        raise RegimeError("the specialized law covers finite q only (plus (inf, 2))")
    s = (Fraction(1, 2) - ir) / iq
    if k >= 0:
        if Fraction(2, 5) < s <= 1:
            theta = Fraction(3, 2) - 3 * ir - 2 * iq
            return StrichartzPrediction(k, q, r, 3, "gp_high", theta, False,
                                        float(2.0 ** (k * float(theta))))
        raise RegimeError(f"s = {s} outside (2/5, 1] for k >= 0")
    if Fraction(1, 2) < s <= 1:
        theta = Fraction(3, 2) - 3 * ir - iq
        return StrichartzPrediction(k, q, r, 3, "gp_low_smooth", theta, False,
                                    float(2.0 ** (k * float(theta))))
    if s == Fraction(1, 2):
        theta = Fraction(7, 2) - 7 * ir - 3 * iq
        const = 2.0 ** (k * float(theta)) * _bracket(k) ** float(2 * iq)
        return StrichartzPrediction(k, q, r, 3, "gp_low_border", theta, True,
                                    float(const))
    if Fraction(2, 5) < s < Fraction(1, 2):
        theta = Fraction(7, 2) - 7 * ir - 3 * iq
        return StrichartzPrediction(k, q, r, 3, "gp_low_steep", theta, False,
                                    float(2.0 ** (k * float(theta))))
    raise RegimeError(f"s = {s} outside (2/5, 1] for k < 0")


def predict_constant(k: int, q, r, d: int = 3, exponents="gp") -> StrichartzPrediction:
    """Dyadic constant for band k: exponents='gp' or an (alpha, beta) pair."""
    if exponents == "gp":
        if d != 3:
            raise RegimeError("the specialized law is three-dimensional")
        return predict_gp(k, q, r)
    alpha, beta = exponents
    return predict_general(k, q, r, d, alpha, beta)


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def _h_symbol(rho: np.ndarray) -> np.ndarray:
    return rho * np.sqrt(2.0 + rho**2)


def _group_velocity(rho: float) -> float:
    return (2.0 + 2.0 * rho**2) / np.sqrt(2.0 + rho**2)


def default_window(k: int, cap: float = WINDOW_CAP) -> float:
    alpha = 2.0 if k >= 0 else 1.0
    return float(min(2.0**10 * 2.0 ** (-min(alpha * k, 2.0 * k)), cap))


def measurement_grid(k: int, T: float) -> RadialGrid:
    """Grid resolving band k whose box outruns the free flow over [0, T]."""
    rho_top = 1.6 * 2.0 ** (k + 1)
    r_need = _group_velocity(rho_top) * T * 1.15 + 40.0 * 2.0 ** (-min(k, 0))
    rho_need = 1.2 * 2.0 ** (k + 2)
    n = 1 << int(np.ceil(np.log2(rho_need * r_need / np.pi)))
    n = max(n, 1024)
    if n > N_MAX:
        raise GridError(
            f"band k={k} over window T={T:g} needs n={n} > {N_MAX}: "
            "grid too large, refusing before allocation"
        )
    return RadialGrid(n, r_need)


def band_profile(grid: RadialGrid, k: int, kind: str = "band_gaussian") -> RadialField:
    """Unit-mass initial data localized on band k (frequency side)."""
    rho = grid.rho
    if kind == "band_indicator":
        data = chi_band(rho, k).astype(complex)
    elif kind == "band_gaussian":
        center = 2.0**k
        data = np.exp(-((rho - center) ** 2) / (2.0 * (center / 8.0) ** 2)).astype(complex)
        data[np.abs(rho - center) > center * 0.9] = 0.0
    else:
        raise GridError(f"unknown profile {kind!r}")
    f = RadialField(grid, FREQUENCY, data)
    nrm = l2_norm(f)
    if nrm == 0.0:
        raise GridError(f"band k={k} is not resolved by the grid")
    return f * (1.0 / nrm)


def _sample_times(T: float, nt: int) -> np.ndarray:
    """Linear segment through the transient, then log-spaced into the tail."""
    n_lin = max(nt // 8, 16)
    lin = np.linspace(0.0, T / 64.0, n_lin, endpoint=False)
    log = np.geomspace(T / 64.0, T, nt - n_lin)
    return np.unique(np.concatenate([lin, log]))


@dataclass(frozen=True)
class MixedNormResult:
    k: int
    q: object
    r: object
    window: float
    profile: str
    measured: float
    predicted: float
    ratio: float
    tail_fraction: float
    tail_flagged: bool


def measure_constant(k: int, q, r, profile: str = "band_gaussian",
                     T: float | None = None, nt: int = 512,
                     grid: RadialGrid | None = None,
                     exponents="gp", d: int = 3) -> MixedNormResult:
    """Windowed L_t^q L_x^r of the free flow of one band profile.

    The result is normalized by the initial mass (the profile is built with
    unit L^2 norm) and divided by the predicted constant.  A power law is
    fitted to the integrand's final decade to estimate the truncated tail;
    a tail above 5% of the accumulated integral flags the result.
    """
    if T is None:
        T = default_window(k)
    if grid is None:
        grid = measurement_grid(k, T)
    if 2.0 ** (k + 1) > grid.rho_max / 2.0:
        raise GridError(f"grid does not resolve band k={k}")
    phi = band_profile(grid, k, profile)
    times = _sample_times(T, nt)
    h = _h_symbol(grid.rho)
    r_exp = np.inf if _as_inv(r) == 0 else float(1 / _as_inv(r))
    vals = np.empty(len(times))
    for i, t in enumerate(times):
        ft = inverse_transform(phi.with_data(np.exp(-1j * t * h) * phi.data))
        vals[i] = lebesgue_norm(ft, r_exp)
    pred = predict_constant(k, q, r, d=d, exponents=exponents)
    iq = _as_inv(q)
    if iq == 0:
        measured = float(vals.max())
        tail_fraction, flagged = 0.0, False
    else:
        q_exp = float(1 / iq)
        windowed = float(np.trapezoid(vals**q_exp, times))
        tail, ok = _tail_estimate(times, vals, q_exp)
        tail_fraction = tail / windowed if windowed > 0 else 0.0
        flagged = (not ok) or tail_fraction > 0.05
        if flagged:
            warnings.warn(
                f"window truncation at k={k}, (q,r)=({q},{r}): "
                f"tail fraction {tail_fraction:.3f}",
                WindowTruncationWarning,
            )
        measured = float((windowed + max(tail, 0.0)) ** (1.0 / q_exp))
    return MixedNormResult(k, q, r, float(T), profile, measured, pred.constant,
                           measured / pred.constant, float(tail_fraction), flagged)


def _tail_estimate(times: np.ndarray, vals: np.ndarray, q_exp: float) -> tuple[float, bool]:
    """Extrapolate int_T^inf vals^q dt from the last decade's power law."""
    T = times[-1]
    sel = (times >= T / 10.0) & (vals > 0)
    if sel.sum() < 4:
        return 0.0, False
    fit = linregress(np.log(times[sel]), np.log(vals[sel]))
    p = -fit.slope * q_exp  # integrand decays like t^{-p}
    if p <= 1.0 + 1e-9:
        return np.inf, False
    c_end = vals[sel][-1] ** q_exp
    return float(c_end * T / (p - 1.0)), True


@dataclass
class ScanResult:
    cells: list[MixedNormResult]
    slopes: dict  # (q, r, 'pos'|'neg') -> (slope, stderr2)

    def table(self):
        return [
            (c.k, c.q, c.r, c.measured, c.predicted, c.ratio, c.tail_flagged)
            for c in self.cells
        ]


def scan(k_range, qr_list, profile: str = "band_gaussian", nt: int = 512,
         exponents="gp", window_cap: float = WINDOW_CAP) -> ScanResult:
    """Measure every (k, q, r) cell and fit log2 measured against k.

    Slopes are fitted separately over k >= 0 and k < 0 (the predicted
    exponent differs across the sign); individual cells may fail without
    aborting the scan.
    """
    cells: list[MixedNormResult] = []
    errors: list[tuple] = []
    for q, r in qr_list:
        for k in k_range:
            try:
                cells.append(
                    measure_constant(k, q, r, profile=profile, nt=nt,
                                     T=default_window(k, window_cap),
                                     exponents=exponents)
                )
            except (GridError, RegimeError) as exc:  # cell-local failure
                errors.append((k, q, r, str(exc)))
    slopes = {}
    for q, r in qr_list:
        for label, pick in (("pos", lambda c: c.k >= 0), ("neg", lambda c: c.k < 0)):
            sub = [c for c in cells if c.q == q and c.r == r and pick(c)]
            if len(sub) >= 3:
                ks = np.array([c.k for c in sub], dtype=float)
                ms = np.log2([c.measured for c in sub])
                fit = linregress(ks, ms)
                slopes[(q, r, label)] = (float(fit.slope), float(2.0 * fit.stderr))
    out = ScanResult(cells, slopes)
    out.errors = errors
    return out
