"""Radial spectral fields on R^3: transforms, multipliers, and norms.

A field is a radial profile f(|x|) sampled at r_j = j*dr, j = 1..n, with
dr = r_max/(n+1), so both Dirichlet endpoints r = 0 and r = r_max lie off
the grid and carry implicit zeros.  The 3D Fourier transform of a radial
function reduces to a sine transform of r*f(r):

    fhat(rho) = (4*pi/rho) * int_0^inf f(r) sin(rho*r) r dr,
    f(r)      = 1/(2*pi^2*r) * int_0^inf fhat(rho) sin(rho*r) rho drho,

discretized on rho_m = pi*m/r_max, m = 1..n, by the type-I discrete sine
transform.  With these conventions the discrete pair is exactly inverse and
the discrete Parseval identity

    ||f||_{L^2(R^3)}^2 = 4*pi*dr*sum r_j^2 |f_j|^2
                       = (2*pi)^{-3} * 4*pi*drho * sum rho_m^2 |fhat_m|^2

holds to rounding error.  All plain sums over interior nodes equal the
trapezoid rule on [0, r_max] because the endpoint samples vanish.

Frequency multipliers used throughout:

    U(rho)   = rho/sqrt(2+rho^2)          (0-order, wave/Schrodinger mix)
    H(rho)   = rho*sqrt(2+rho^2)          (the linearized dispersion)
    1/(2+rho^2), rho, (2+rho^2)^{s/2}     (resolvent, |D|, Sobolev weight)

plus smooth dyadic band projectors built from a C^inf cutoff eta with
eta == 1 on [0, 5/4] and support in [0, 8/5].
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.fft import dct, dst

from .errors import (
    BoundaryTailWarning,
    GridError,
    LowFrequencyAmplificationWarning,
)

PHYSICAL = "physical"
FREQUENCY = "frequency"

# Fraction of L^2 mass below RHO_ADMISSIBLE_CUT that triggers the
# low-frequency amplification flag when inverting U.
RHO_ADMISSIBLE_CUT = 1.0 / 16.0
LOW_FREQ_MASS_TOL = 1e-3

_SPHERE_AREA = 4.0 * np.pi
C_SPHERE = np.sqrt(_SPHERE_AREA)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid with n interior nodes on (0, r_max)."""

    n: int
    r_max: float

    def __post_init__(self):
        if self.n < 64 or (self.n & (self.n - 1)) != 0:
            raise GridError(f"n must be a power of two >= 64, got {self.n}")
        if not (self.r_max > 0):
            raise GridError(f"r_max must be positive, got {self.r_max}")

    @cached_property
    def dr(self) -> float:
        return self.r_max / (self.n + 1)

    @cached_property
    def drho(self) -> float:
        return np.pi / self.r_max

    @cached_property
    def r(self) -> np.ndarray:
        return self.dr * np.arange(1, self.n + 1)

    @cached_property
    def rho(self) -> np.ndarray:
        return self.drho * np.arange(1, self.n + 1)

    @property
    def rho_max(self) -> float:
        return self.drho * self.n


@dataclass(frozen=True)
class RadialField:
    """Complex radial profile on a shared grid, physical or frequency side.

    Instances are immutable; operations return new fields.
    """

    grid: RadialGrid
    rep: str
    data: np.ndarray

    def __post_init__(self):
        if self.rep not in (PHYSICAL, FREQUENCY):
            raise GridError(f"unknown representation {self.rep!r}")
        if self.data.shape != (self.grid.n,):
            raise GridError(
                f"data length {self.data.shape} does not match grid n={self.grid.n}"
            )
        object.__setattr__(self, "data", np.ascontiguousarray(self.data, dtype=complex))
        self.data.setflags(write=False)

    def with_data(self, data: np.ndarray) -> "RadialField":
        return RadialField(self.grid, self.rep, data)

    def __add__(self, other: "RadialField") -> "RadialField":
        _check_compatible(self, other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "RadialField") -> "RadialField":
        _check_compatible(self, other)
        return self.with_data(self.data - other.data)

    def __mul__(self, c) -> "RadialField":
        return self.with_data(self.data * c)

    __rmul__ = __mul__

    def __neg__(self) -> "RadialField":
        return self.with_data(-self.data)


def _check_compatible(a: RadialField, b: RadialField):
    if a.grid != b.grid:
        raise GridError("fields live on different grids")
    if a.rep != b.rep:
        raise GridError(f"representation mismatch: {a.rep} vs {b.rep}")


def make_field(grid: RadialGrid, values, rep: str = PHYSICAL) -> RadialField:
    return RadialField(grid, rep, np.asarray(values, dtype=complex))


def zero_field(grid: RadialGrid, rep: str = PHYSICAL) -> RadialField:
    return RadialField(grid, rep, np.zeros(grid.n, dtype=complex))


def _dst1(x: np.ndarray) -> np.ndarray:
    # scipy's DST-I of a complex array, kernel 2*sin(pi*j*m/(n+1)).
    if np.iscomplexobj(x):
        return dst(x.real, type=1) + 1j * dst(x.imag, type=1)
    return dst(x, type=1)


def forward_transform(f: RadialField) -> RadialField:
    """Physical -> frequency: fhat(rho_m) = (2*pi*dr/rho_m) * DST1(r*f)_m."""
    if f.rep != PHYSICAL:
        raise GridError("forward_transform expects a physical-side field")
    g = f.grid
    fhat = (2.0 * np.pi * g.dr / g.rho) * _dst1(g.r * f.data)
    return RadialField(g, FREQUENCY, fhat)


def inverse_transform(f: RadialField) -> RadialField:
    """Frequency -> physical: exact discrete inverse of forward_transform."""
    if f.rep != FREQUENCY:
        raise GridError("inverse_transform expects a frequency-side field")
    g = f.grid
    vals = (g.drho / (4.0 * np.pi**2 * g.r)) * _dst1(g.rho * f.data)
    return RadialField(g, PHYSICAL, vals)


def to_frequency(f: RadialField) -> RadialField:
    return f if f.rep == FREQUENCY else forward_transform(f)


def to_physical(f: RadialField) -> RadialField:
    return f if f.rep == PHYSICAL else inverse_transform(f)


# ---------------------------------------------------------------------------
# Smooth dyadic cutoffs
# ---------------------------------------------------------------------------

_ETA_ONE = 1.25  # eta == 1 below this radius
_ETA_SUPP = 1.6  # eta == 0 above this radius


def _smooth_step(s: np.ndarray) -> np.ndarray:
    """C^inf transition: 1 for s <= 0, 0 for s >= 1, exp(-1/s)-mollified."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ga = np.where(s > 0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        gb = np.where(s < 1, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    return gb / (ga + gb)


def eta_bump(x) -> np.ndarray:
    """Even smooth cutoff: 1 on [0, 5/4], supported in [0, 8/5]."""
    ax = np.abs(np.asarray(x, dtype=float))
    return _smooth_step((ax - _ETA_ONE) / (_ETA_SUPP - _ETA_ONE))


def chi_band(x, k: int) -> np.ndarray:
    """Dyadic band function chi_k(x) = eta(x/2^k) - eta(x/2^(k-1))."""
    x = np.asarray(x, dtype=float)
    return eta_bump(x / 2.0**k) - eta_bump(x / 2.0 ** (k - 1))


# ---------------------------------------------------------------------------
# Multipliers
# ---------------------------------------------------------------------------

MULTIPLIERS = ("U", "U_inv", "H", "inv_2mD", "P_k", "P_le_k", "D", "Hs_weight")


def multiplier_symbol(name: str, rho: np.ndarray, k: int | None = None,
                      s: float | None = None) -> np.ndarray:
    if name == "U":
        return rho / np.sqrt(2.0 + rho**2)
    if name == "U_inv":
        return np.sqrt(2.0 + rho**2) / rho
    if name == "H":
        return rho * np.sqrt(2.0 + rho**2)
    if name == "inv_2mD":
        return 1.0 / (2.0 + rho**2)
    if name == "D":
        return rho.copy()
    if name == "Hs_weight":
        if s is None:
            raise GridError("Hs_weight needs the order s")
        return (2.0 + rho**2) ** (s / 2.0)
    if name == "P_k":
        if k is None:
            raise GridError("P_k needs the band index k")
        return chi_band(rho, k)
    if name == "P_le_k":
        if k is None:
            raise GridError("P_le_k needs the band index k")
        return eta_bump(rho / 2.0**k)
    raise GridError(f"unknown multiplier {name!r}")


def low_frequency_mass_fraction(f: RadialField, rho_cut: float = RHO_ADMISSIBLE_CUT) -> float:
    """Fraction of the L^2 mass carried by frequencies below rho_cut."""
    fh = to_frequency(f)
    w = fh.grid.rho**2 * np.abs(fh.data) ** 2
    total = w.sum()
    if total == 0.0:
        return 0.0
    return float(w[fh.grid.rho < rho_cut].sum() / total)


def apply_multiplier(f: RadialField, name: str, k: int | None = None,
                     s: float | None = None) -> RadialField:
    """Apply a diagonal Fourier multiplier (or 'grad_mag', see below).

    Returns a field in the same representation as the input.  'grad_mag' is
    the pointwise magnitude of the radial derivative; it is the one entry
    that is not diagonal on the frequency side.

    Inverting U amplifies the lowest frequencies by up to sqrt(2)/rho_1;
    if more than LOW_FREQ_MASS_TOL of the L^2 mass sits below
    RHO_ADMISSIBLE_CUT the operation succeeds but emits
    LowFrequencyAmplificationWarning with the amplification factor.
    """
    if name == "grad_mag":
        d = radial_derivative(f)
        out = d.with_data(np.abs(d.data).astype(complex))
        return out if f.rep == PHYSICAL else forward_transform(out)
    fh = to_frequency(f)
    if name == "U_inv":
        frac = low_frequency_mass_fraction(fh)
        if frac > LOW_FREQ_MASS_TOL:
            amp = float(np.sqrt(2.0 + fh.grid.rho[0] ** 2) / fh.grid.rho[0])
            warnings.warn(
                f"low-frequency amplification: mass fraction {frac:.3e} below "
                f"rho={RHO_ADMISSIBLE_CUT:g}, amplification factor {amp:.3e}",
                LowFrequencyAmplificationWarning,
            )
    sym = multiplier_symbol(name, fh.grid.rho, k=k, s=s)
    out = fh.with_data(sym * fh.data)
    return out if f.rep == FREQUENCY else inverse_transform(out)


def radial_derivative(f: RadialField) -> RadialField:
    """Spectral d/dr of a radial profile, returned on the physical side.

    Uses d/dr f = ((r f)' - f)/r with (r f)' summed as a cosine series on
    the same nodes, consistent with the sine expansion of r*f.
    """
    g = f.grid
    fh = to_frequency(f)
    # sine coefficients of r*f(r): c_m = drho*rho_m*fhat_m/(2*pi^2)
    c = g.drho * g.rho * fh.data / (2.0 * np.pi**2)
    ext = np.zeros(g.n + 2, dtype=complex)
    ext[1:-1] = c * g.rho
    cos_sum = 0.5 * (dct(ext.real, type=1) + 1j * dct(ext.imag, type=1))
    vals = (cos_sum[1:-1] - to_physical(f).data) / g.r
    return RadialField(g, PHYSICAL, vals)


def dealias(f: RadialField, fraction: float = 2.0 / 3.0) -> RadialField:
    """Zero all modes above `fraction` of the top frequency (2/3 rule)."""
    fh = to_frequency(f)
    cut = int(np.floor(fraction * fh.grid.n))
    data = fh.data.copy()
    data[cut:] = 0.0
    out = fh.with_data(data)
    return out if f.rep == FREQUENCY else inverse_transform(out)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

BOUNDARY_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class NormSpec:
    """Which norm to evaluate: kind plus the applicable exponents.

    kind in {'lebesgue_r', 'sobolev_Hs', 'homog_sobolev', 'mixed_LqLr'};
    q, r in [1, inf] (np.inf allowed), s any real, window = (t0, t1) for
    mixed norms.
    """

    kind: str
    q: float | None = None
    r: float | None = None
    s: float | None = None
    window: tuple[float, float] | None = None

    def __post_init__(self):
        kinds = ("lebesgue_r", "sobolev_Hs", "homog_sobolev", "mixed_LqLr")
        if self.kind not in kinds:
            raise GridError(f"unknown norm kind {self.kind!r}")
        for ex in (self.q, self.r):
            if ex is not None and not (1.0 <= ex):
                raise GridError(f"Lebesgue exponent out of range: {ex}")
        if self.kind == "lebesgue_r" and self.r is None:
            raise GridError("lebesgue_r needs r")
        if self.kind in ("sobolev_Hs", "homog_sobolev") and self.s is None:
            raise GridError(f"{self.kind} needs s")
        if self.kind == "mixed_LqLr" and (self.q is None or self.r is None):
            raise GridError("mixed_LqLr needs q and r")


def _check_boundary_tail(vals: np.ndarray):
    m = np.abs(vals).max()
    if m > 0 and np.abs(vals[-1]) > BOUNDARY_TAIL_TOL * m:
        warnings.warn(
            "field does not decay at r_max; radial integrals may be off",
            BoundaryTailWarning,
        )


def lebesgue_norm(f: RadialField, r: float) -> float:
    """L^r(R^3) of a radial profile by the trapezoid rule; r=inf is a sup."""
    vals = to_physical(f).data
    if np.isinf(r):
        return float(np.abs(vals).max())
    _check_boundary_tail(vals)
    g = f.grid
    return float((_SPHERE_AREA * g.dr * np.sum(np.abs(vals) ** r * g.r**2)) ** (1.0 / r))


def l2_norm(f: RadialField) -> float:
    """L^2(R^3), evaluated on whichever side the field lives (Parseval-exact)."""
    g = f.grid
    if f.rep == PHYSICAL:
        return float(np.sqrt(_SPHERE_AREA * g.dr * np.sum(np.abs(f.data) ** 2 * g.r**2)))
    w = _SPHERE_AREA * g.drho / (2.0 * np.pi) ** 3
    return float(np.sqrt(w * np.sum(np.abs(f.data) ** 2 * g.rho**2)))


def sobolev_norm(f: RadialField, s: float, homogeneous: bool = False) -> float:
    """H^s norm with weight (2+rho^2)^{s/2}, or rho^s if homogeneous."""
    fh = to_frequency(f)
    name = "D" if homogeneous else "Hs_weight"
    if homogeneous:
        w = fh.grid.rho**s
        return l2_norm(fh.with_data(w * fh.data))
    return l2_norm(apply_multiplier(fh, name, s=s))


def sphere_averaged_norm(f: RadialField, r: float) -> float:
    """L_x^r with the angular L^2 average folded in: sqrt(4 pi) * L^r.

    The sphere constant is applied uniformly so that every ratio of two such
    norms, and every mixed-norm ratio built from them, is independent of the
    normalization choice.
    """
    return C_SPHERE * lebesgue_norm(f, r)


def fractional_lebesgue_sobolev_norm(f: RadialField, s: float, p: float,
                                     homogeneous: bool = False) -> float:
    """|| <D>^s f ||_{L^p}: frequency weight, then the physical L^p integral."""
    fh = to_frequency(f)
    g = f.grid
    w = g.rho**s if homogeneous else (2.0 + g.rho**2) ** (s / 2.0)
    return lebesgue_norm(inverse_transform(fh.with_data(w * fh.data)), p)


def norm(f: RadialField, spec: NormSpec) -> float:
    """Evaluate a NormSpec on a single-time field (mixed kinds need a trajectory)."""
    if spec.kind == "lebesgue_r":
        return lebesgue_norm(f, spec.r)
    if spec.kind == "sobolev_Hs":
        return sobolev_norm(f, spec.s)
    if spec.kind == "homog_sobolev":
        return sobolev_norm(f, spec.s, homogeneous=True)
    raise GridError("mixed_LqLr requires mixed_spacetime_norm on a trajectory")


def mixed_spacetime_norm(fields, q: float, r: float,
                         window: tuple[float, float],
                         times: np.ndarray | None = None) -> float:
    """L_t^q L_x^r over a sampled trajectory; trapezoid in t, max for q=inf."""
    fields = list(fields)
    if len(fields) < 16:
        raise GridError(f"need at least 16 time samples, got {len(fields)}")
    if times is None:
        times = np.linspace(window[0], window[1], len(fields))
    else:
        times = np.asarray(times, dtype=float)
        if times.shape != (len(fields),):
            raise GridError("times length does not match trajectory")
    vals = np.array([lebesgue_norm(f, r) for f in fields])
    if np.isinf(q):
        return float(vals.max())
    return float(np.trapezoid(vals**q, times) ** (1.0 / q))


# ---------------------------------------------------------------------------
# Snapshot serialization
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<qdqd")  # n, r_max, rep flag, time


def write_snapshot(path, f: RadialField, t: float = 0.0):
    """Flat binary record: little-endian header then 2n float64 (re, im)."""
    rep_flag = 0 if f.rep == PHYSICAL else 1
    buf = _HEADER.pack(f.grid.n, f.grid.r_max, rep_flag, float(t))
    inter = np.empty(2 * f.grid.n, dtype="<f8")
    inter[0::2] = f.data.real
    inter[1::2] = f.data.imag
    with open(path, "wb") as fh:
        fh.write(buf)
        fh.write(inter.tobytes())


def read_snapshot(path) -> tuple[RadialField, float]:
    with open(path, "rb") as fh:
        n, r_max, rep_flag, t = _HEADER.unpack(fh.read(_HEADER.size))
        inter = np.frombuffer(fh.read(16 * n), dtype="<f8")
    data = inter[0::2] + 1j * inter[1::2]
    rep = PHYSICAL if rep_flag == 0 else FREQUENCY
    return RadialField(RadialGrid(n, r_max), rep, data), t


# ---------------------------------------------------------------------------
# Test-field constructors
# ---------------------------------------------------------------------------

def gaussian_field(grid: RadialGrid, sigma: float = 1.0, amplitude: float = 1.0) -> RadialField:
    return make_field(grid, amplitude * np.exp(-grid.r**2 / (2.0 * sigma**2)))


def random_band_limited(grid: RadialGrid, rng: np.random.Generator,
                        k_lo: int, k_hi: int,
                        envelope_sigma: float | None = None,
                        amplitude: float = 1.0) -> RadialField:
    """Real random field with frequency content in bands k_lo..k_hi.

    Random coefficients are shaped by the smooth band cutoffs, pulled to the
    physical side, and localized by a Gaussian envelope (default r_max/8) so
    that products of such fields stay resolved on the grid.
    """
    mask = eta_bump(grid.rho / 2.0**k_hi) - eta_bump(grid.rho / 2.0 ** (k_lo - 1))
    coeff = rng.standard_normal(grid.n) * mask
    f = inverse_transform(RadialField(grid, FREQUENCY, coeff.astype(complex)))
    sigma = envelope_sigma if envelope_sigma is not None else grid.r_max / 8.0
    vals = f.data.real * np.exp(-grid.r**2 / (2.0 * sigma**2))
    out = make_field(grid, vals)
    nrm = l2_norm(out)
    if nrm == 0.0:
        return out
    return out * (amplitude / nrm)
