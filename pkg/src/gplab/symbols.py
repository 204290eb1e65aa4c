"""Dispersion-relation catalog and dyadic band classification.

Each catalog entry carries a radial dispersion relation omega(r) together
with closed forms for its first three derivatives.  On a dyadic band
I_k = (2^{k-1}, 2^{k+1}) the classifier measures, over a geometric sample
grid, the implied constants of the lower bounds

    |omega'(r)|  >= c * 2^{k*(alpha-1)},
    |omega''(r)| >= c * 2^{k*(beta-2)},

the ratio bound |omega''/omega'| * 2^k, the sign condition
omega'*omega'' > 0, and the number of sign changes of omega'''.  The
candidate pair (alpha, beta) is accepted when the measured constants stay
above C_MIN uniformly in k and the ratio stays below C_RATIO_MAX; beta must
additionally satisfy the admissibility k*(alpha-beta) >= 0 that the
stronger condition encodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateBandError, DomainError

# Operationalization of the uniform-in-k lower bounds.  0.05 passes the full
# catalog (the power dispersion r^a with a = 1/2 bottoms out near
# a*(1-a)*2^{a-2} ~ 0.088 on its band) while rejecting quarter-integer
# exponent errors at |k| = 8 by a factor 4.
C_MIN = 0.05
C_RATIO_MAX = 10.0
DEFAULT_GRID_POINTS = 256

CATALOG_NAMES = ("gp", "schrodinger", "klein_gordon", "beam", "fourth_order")


@dataclass(frozen=True)
class SymbolSpec:
    """A dispersion relation omega with derivatives up to order three."""

    name: str
    params: tuple[float, ...]
    omega: Callable[[np.ndarray], np.ndarray]
    omega1: Callable[[np.ndarray], np.ndarray]
    omega2: Callable[[np.ndarray], np.ndarray]
    omega3: Callable[[np.ndarray], np.ndarray]

    def label(self) -> str:
        if self.params:
            return f"{self.name}({', '.join(f'{p:g}' for p in self.params)})"
        return self.name


@dataclass(frozen=True)
class DyadicBand:
    """Band index k with the open interval I_k = (2^{k-1}, 2^{k+1})."""

    k: int

    @property
    def interval(self) -> tuple[float, float]:
        return (2.0 ** (self.k - 1), 2.0 ** (self.k + 1))

    def sample_grid(self, points: int) -> np.ndarray:
        lo, hi = self.interval
        # geometric grid on the open interval; endpoints approached, not hit
        t = (np.arange(points) + 0.5) / points
        return lo * (hi / lo) ** t


@dataclass(frozen=True)
class DyadicClassification:
    """Measured band diagnostics and the resulting H1/H2/H3 flags."""

    k: int
    alpha: float
    beta: float
    h1: bool
    h2: bool
    h3: bool
    c_lower_1: float
    c_lower_2: float
    ratio_bound: float
    sign_changes_omega3: int


def _gp_symbol() -> SymbolSpec:
    return SymbolSpec(
        "gp",
        (),
        omega=lambda r: r * np.sqrt(2.0 + r**2),
        omega1=lambda r: (2.0 + 2.0 * r**2) / np.sqrt(2.0 + r**2),
        omega2=lambda r: (6.0 * r + 2.0 * r**3) / (2.0 + r**2) ** 1.5,
        omega3=lambda r: 12.0 / (2.0 + r**2) ** 2.5,
    )


def _schrodinger_symbol(a: float) -> SymbolSpec:
    if not (a > 0):
        raise DomainError(f"power dispersion needs a > 0, got a={a}")
    return SymbolSpec(
        "schrodinger",
        (a,),
        omega=lambda r: r**a,
        omega1=lambda r: a * r ** (a - 1),
        omega2=lambda r: a * (a - 1) * r ** (a - 2) * np.ones_like(r),
        omega3=lambda r: a * (a - 1) * (a - 2) * r ** (a - 3) * np.ones_like(r),
    )


def _klein_gordon_symbol() -> SymbolSpec:
    return SymbolSpec(
        "klein_gordon",
        (),
        omega=lambda r: np.sqrt(1.0 + r**2),
        omega1=lambda r: r / np.sqrt(1.0 + r**2),
        omega2=lambda r: (1.0 + r**2) ** -1.5,
        omega3=lambda r: -3.0 * r * (1.0 + r**2) ** -2.5,
    )


def _beam_symbol() -> SymbolSpec:
    return SymbolSpec(
        "beam",
        (),
        omega=lambda r: np.sqrt(1.0 + r**4),
        omega1=lambda r: 2.0 * r**3 / np.sqrt(1.0 + r**4),
        omega2=lambda r: (6.0 * r**2 + 2.0 * r**6) / (1.0 + r**4) ** 1.5,
        omega3=lambda r: 12.0 * r * (1.0 - r**4) / (1.0 + r**4) ** 2.5,
    )


def _fourth_order_symbol(eps: float) -> SymbolSpec:
    if eps < 0:
        raise DomainError(f"fourth_order needs eps >= 0, got {eps}")
    return SymbolSpec(
        "fourth_order",
        (eps,),
        omega=lambda r: r**2 + eps * r**4,
        omega1=lambda r: 2.0 * r + 4.0 * eps * r**3,
        omega2=lambda r: 2.0 + 12.0 * eps * r**2 * np.ones_like(r),
        omega3=lambda r: 24.0 * eps * r * np.ones_like(r),
    )


def catalog_lookup(name: str, params: Sequence[float] = ()) -> SymbolSpec:
    """Build a catalog entry; closed-form derivatives, no differentiation."""
    params = tuple(float(p) for p in params)
    if name == "gp":
        if params:
            raise DomainError("gp takes no parameters")
        return _gp_symbol()
    if name == "schrodinger":
        if len(params) != 1:
            raise DomainError("schrodinger takes one parameter: the power a")
        return _schrodinger_symbol(params[0])
    if name == "klein_gordon":
        if params:
            raise DomainError("klein_gordon takes no parameters")
        return _klein_gordon_symbol()
    if name == "beam":
        if params:
            raise DomainError("beam takes no parameters")
        return _beam_symbol()
    if name == "fourth_order":
        if len(params) != 1:
            raise DomainError("fourth_order takes one parameter: the coefficient eps")
        return _fourth_order_symbol(params[0])
    raise DomainError(f"unknown symbol {name!r}; catalog: {CATALOG_NAMES}")


def _count_sign_changes(vals: np.ndarray) -> int:
    s = np.sign(vals)
    s = s[s != 0]
    if s.size < 2:
        return 0
    return int(np.sum(s[1:] != s[:-1]))


def classify_band(spec: SymbolSpec, band: DyadicBand, alpha: float, beta: float,
                  grid_points: int = DEFAULT_GRID_POINTS) -> DyadicClassification:
    """Check the candidate exponents (alpha, beta) on one dyadic band."""
    if grid_points < 64:
        raise DomainError(f"grid_points must be >= 64, got {grid_points}")
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise DomainError("alpha and beta must be finite")
    k = band.k
    r = band.sample_grid(grid_points)
    w1 = np.asarray(spec.omega1(r), dtype=float)
    w2 = np.asarray(spec.omega2(r), dtype=float)
    w3 = np.asarray(spec.omega3(r), dtype=float)
    if not (np.all(np.isfinite(w1)) and np.all(np.isfinite(w2)) and np.all(np.isfinite(w3))):
        raise DomainError(f"non-finite derivative value on band k={k}")

    c1 = float(np.min(np.abs(w1)) / 2.0 ** (k * (alpha - 1)))
    c2 = float(np.min(np.abs(w2)) / 2.0 ** (k * (beta - 2)))
    with np.errstate(divide="ignore"):
        ratio = float(np.max(np.abs(w2) / np.abs(w1)) * 2.0**k) if np.all(w1 != 0) else np.inf

    h1 = c1 >= C_MIN
    admissible = k * (alpha - beta) >= 0
    h2 = h1 and admissible and c2 >= C_MIN and ratio <= C_RATIO_MAX
    h3 = bool(np.all(w1 * w2 > 0))
    return DyadicClassification(
        k=k, alpha=alpha, beta=beta, h1=h1, h2=h2, h3=h3,
        c_lower_1=c1, c_lower_2=c2, ratio_bound=ratio,
        sign_changes_omega3=_count_sign_changes(w3),
    )


def _round_quarter(x: float) -> float:
    return round(4.0 * x) / 4.0


def suggest_exponents(spec: SymbolSpec, band: DyadicBand,
                      grid_points: int = DEFAULT_GRID_POINTS) -> tuple[float, float | None]:
    """Propose (alpha, beta) from log-log slopes of |omega'|, |omega''|.

    Least-squares slopes over the band, rounded to the nearest quarter
    integer, with beta clamped toward alpha when the raw fit violates
    k*(alpha-beta) >= 0.  Returns beta = None when omega'' vanishes on the
    band (no curvature lower bound is attainable there).
    """
    k = band.k
    r = band.sample_grid(grid_points)
    w1 = np.abs(np.asarray(spec.omega1(r), dtype=float))
    w2 = np.abs(np.asarray(spec.omega2(r), dtype=float))
    if np.any(w1 == 0) or not np.all(np.isfinite(w1)):
        raise DegenerateBandError(f"omega' vanishes on band k={k}")
    lr = np.log2(r)
    alpha = _round_quarter(float(np.polyfit(lr, np.log2(w1), 1)[0]) + 1.0)
    if np.any(w2 == 0) or not np.all(np.isfinite(w2)):
        return alpha, None
    beta = _round_quarter(float(np.polyfit(lr, np.log2(w2), 1)[0]) + 2.0)
    if k * (alpha - beta) < 0:
        beta = alpha
    return alpha, beta


def stated_exponents(spec: SymbolSpec, k: int) -> tuple[float, float | None, bool, bool]:
    """Reference (alpha, beta, h2, h3) for every catalog entry and band sign.

    These are the assignments the classifier must reproduce; beta is None
    when no curvature bound holds (pure first-order dispersion).
    """
    if spec.name == "gp":
        return (2.0, 2.0, True, True) if k >= 0 else (1.0, 3.0, True, True)
    if spec.name == "schrodinger":
        a = spec.params[0]
        if a > 1:
            return (a, a, True, True)
        if a == 1:
            return (1.0, None, False, False)
        return (a, a, True, False)
    if spec.name == "klein_gordon":
        return (1.0, -1.0, True, True) if k >= 0 else (2.0, 2.0, True, True)
    if spec.name == "beam":
        return (2.0, 2.0, True, True) if k >= 0 else (4.0, 4.0, True, True)
    if spec.name == "fourth_order":
        return (2.0, 2.0, True, True)
    raise DomainError(f"no reference exponents for {spec.name!r}")
