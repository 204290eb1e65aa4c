"""Reproducible experiment runner binding all modules.

Each experiment is a named entry in EXPERIMENTS with a typed parameter
schema, a runner, and a set of pass/fail checks with pinned tolerances.
Configuration comes from flat ``key=value`` text files and/or override
mappings; unknown keys are rejected.  All randomness flows from one seed
through numpy SeedSequence spawning (child 0: random test states; further
children are reserved per experiment), so a run with the same seed and
build reproduces every output byte for byte.  Output files are written
atomically (temp file, then rename) with 17-significant-digit floats, and
the run report carries a sha256 manifest of everything written.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, GplabError, RegimeError
from . import bessel as bessel_mod
from . import dynamics as dyn
from . import strichartz as stri
from .field import RadialGrid, gaussian_field, l2_norm, write_snapshot, zero_field
from .oscillatory import kernel_decay_scan
from .symbols import DyadicBand, catalog_lookup, classify_band, stated_exponents

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    type: type
    default: object
    lo: float | None = None
    hi: float | None = None
    choices: tuple | None = None

    def validate(self, key: str, raw):
        if self.type is bool and isinstance(raw, str):
            if raw.lower() in ("1", "true", "yes"):
                val = True
            elif raw.lower() in ("0", "false", "no"):
                val = False
            else:
                raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        else:
            try:
                val = self.type(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: {exc}") from exc
        if self.lo is not None and val < self.lo:
            raise ConfigError(f"{key}={val} below minimum {self.lo}")
        if self.hi is not None and val > self.hi:
            raise ConfigError(f"{key}={val} above maximum {self.hi}")
        if self.choices is not None and val not in self.choices:
            raise ConfigError(f"{key}={val!r} not one of {self.choices}")
        return val


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    seed: int = 0
    output_dir: str = "."
    jobs: int = 1

    def echo(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "jobs": self.jobs,
            **{k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()},
        }


def parse_config_text(text: str) -> dict:
    """Flat key=value lines; blank lines and #-comments ignored."""
    out = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key=value, got {line!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def serialize_config(config: ExperimentConfig) -> str:
    lines = [f"experiment={config.experiment}", f"seed={config.seed}",
             f"jobs={config.jobs}"]
    for k in sorted(config.params):
        v = config.params[k]
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def build_config(experiment: str, overrides: dict | None = None,
                 seed: int = 0, output_dir: str = ".", jobs: int = 1) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; have {sorted(EXPERIMENTS)}"
        )
    schema = EXPERIMENTS[experiment]["schema"]
    params = {k: p.default for k, p in schema.items()}
    for key, raw in (overrides or {}).items():
        if key in ("experiment", "seed", "output_dir", "jobs"):
            continue
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for {experiment}")
        params[key] = schema[key].validate(key, raw)
    if not (0 <= int(seed) < 2**64):
        raise ConfigError("seed must fit in 64 bits")
    return ExperimentConfig(experiment, params, int(seed), str(output_dir), int(jobs))


def parse_config_file(path, experiment: str | None = None, **kw) -> ExperimentConfig:
    raw = parse_config_text(Path(path).read_text())
    exp = raw.pop("experiment", experiment)
    if exp is None:
        raise ConfigError("config file does not name an experiment")
    seed = int(raw.pop("seed", kw.pop("seed", 0)))
    jobs = int(raw.pop("jobs", kw.pop("jobs", 1)))
    out = raw.pop("output_dir", kw.pop("output_dir", "."))
    return build_config(exp, raw, seed=seed, output_dir=out, jobs=jobs)


# ---------------------------------------------------------------------------
# Atomic output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % float(v)
    return str(v)


def write_csv(path: Path, header: list[str], rows, trailing_json: dict | None = None):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    if trailing_json is not None:
        lines.append("# " + json.dumps(trailing_json, sort_keys=True))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


@dataclass
class Check:
    name: str
    passed: bool
    value: float | str
    tolerance: str

    def as_dict(self):
        v = self.value
        return {"name": self.name, "passed": bool(self.passed),
                "value": v if isinstance(v, str) else float(v),
                "tolerance": self.tolerance}


@dataclass
class RunReport:
    config: dict
    version: str
    wall_time_s: float
    checks: list[Check]
    outputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "config": self.config,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "outputs": self.outputs,
            **self.extra,
        }


def _manifest(outdir: Path, names) -> dict:
    out = {}
    for name in names:
        digest = hashlib.sha256((outdir / name).read_bytes()).hexdigest()
        out[name] = digest
    return out


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------

def _run_symbol_check(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    spec = catalog_lookup(p["name"], json.loads(p["params"]))
    rows, all_match = [], True
    for k in range(p["kmin"], p["kmax"] + 1):
        alpha, beta, h2_exp, h3_exp = stated_exponents(spec, k)
        cand = alpha if beta is None else beta
        cls = classify_band(spec, DyadicBand(k), alpha, cand, p["grid_points"])
        ok = cls.h1 and cls.h2 == h2_exp and cls.h3 == h3_exp
        all_match = all_match and ok
        rows.append((k, cls.alpha, cls.beta, cls.h1, cls.h2, cls.h3,
                     cls.c_lower_1, cls.c_lower_2, cls.ratio_bound))
    write_csv(outdir / "symbol_check.csv",
              ["k", "alpha", "beta", "h1", "h2", "h3",
               "c_lower_1", "c_lower_2", "ratio_bound"], rows)
    checks = [Check("flags_match_reference", all_match, "exact", "exact flag match")]
    return checks, ["symbol_check.csv"], {}


def _stri_cell(args):
    k, q, r, profile, nt, cap = args
    qv = np.inf if q == "inf" else Fraction(q)
    rv = np.inf if r == "inf" else Fraction(r)
    c = stri.measure_constant(k, qv, rv, profile=profile, nt=nt,
                              T=stri.default_window(k, cap))
    return (k, str(q), str(r), c.measured, c.predicted, c.ratio,
            c.tail_flagged, float(c.window))


def _run_strichartz_scan(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    qr_list = []
    for pair in p["qr"].split(","):
        q, r = pair.split(":")
        qr_list.append((q.strip(), r.strip()))
    ks = list(range(p["kmin"], p["kmax"] + 1))
    tasks = [(k, q, r, p["profile"], p["nt"], p["window_cap"])
             for (q, r) in qr_list for k in ks]
    import warnings as _w

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_stri_cell, tasks))
    else:
        with _w.catch_warnings():
            _w.simplefilter("ignore")
            results = [_stri_cell(t) for t in tasks]
    write_csv(outdir / "strichartz_scan.csv",
              ["k", "q", "r", "measured", "predicted", "ratio", "tail_flag", "window"],
              results)
    checks, slopes = [], {}
    for (q, r) in qr_list:
        qv = np.inf if q == "inf" else Fraction(q)
        rv = np.inf if r == "inf" else Fraction(r)
        for label, pick in (("pos", lambda k: k >= 0), ("neg", lambda k: k < 0)):
            sub = [(row[0], row[3]) for row in results
                   if row[1] == q and row[2] == r and pick(row[0])]
            if len(sub) < 3:
                continue
            karr = np.array([s[0] for s in sub], dtype=float)
            marr = np.log2([s[1] for s in sub])
            from scipy.stats import linregress

            slope = float(linregress(karr, marr).slope)
            theta = float(stri.predict_constant(int(karr[0]), qv, rv).theta)
            slopes[f"{q}:{r}:{label}"] = {"slope": slope, "theta": theta}
            checks.append(Check(
                f"slope_{q}:{r}_{label}", abs(slope - theta) <= 0.1, slope,
                f"theta {theta:+.3f} +- 0.1"))
            ratios = [row[5] for row in results
                      if row[1] == q and row[2] == r and pick(row[0])]
            spread = max(ratios) / min(ratios)
            checks.append(Check(
                f"ratio_spread_{q}:{r}_{label}", spread < 4.0, spread, "< 4"))
            checks.append(Check(
                f"ratio_upper_{q}:{r}_{label}", max(ratios) <= 1.5, max(ratios),
                "<= 1.5 (frozen empirical bound)"))
    summary = {"slopes": slopes, "tolerance": 0.1,
               "pass": all(c.passed for c in checks)}
    _atomic_write(outdir / "strichartz_summary.json",
                  json.dumps(summary, indent=2, sort_keys=True).encode())
    return checks, ["strichartz_scan.csv", "strichartz_summary.json"], {}


def _run_kernel_decay(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    spec = catalog_lookup(p["symbol"], json.loads(p["params"]))
    ts = np.geomspace(p["tmin"], p["tmax"], p["points"])
    scan = kernel_decay_scan(spec, p["k"], ts, tol=p["tol"])
    slopes = {
        "stationary": scan.slope_stationary, "stationary_ci": scan.ci_stationary,
        "far": scan.slope_far, "far_ci": scan.ci_far,
    }
    write_csv(outdir / "kernel_decay.csv",
              ["t", "sup_abs_stationary", "sup_abs_far"],
              list(zip(scan.t, scan.sup_stationary, scan.sup_far)),
              trailing_json=slopes)
    checks = [
        Check("stationary_slope", abs(scan.slope_stationary + 0.5) <= 0.15,
              scan.slope_stationary, "-0.5 +- 0.15"),
        Check("far_slope", scan.slope_far <= -1.8, scan.slope_far, "<= -1.8"),
    ]
    return checks, ["kernel_decay.csv"], {"slopes": slopes}


def _run_bessel_check(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    nus = [v for v in (0.5, 5.0, 11.0, 50.0) if v <= p["numax"]]
    if p["numax"] not in nus and p["numax"] > 0:
        nus.append(float(p["numax"]))
    r_grid = np.logspace(0, np.log10(p["rmax"]), p["points"])
    rep = bessel_mod.bessel_uniform_decay_check(nus, r_grid)
    rows = [(nu, rep.per_nu[nu]) for nu in sorted(rep.per_nu)]
    write_csv(outdir / "bessel_envelope.csv", ["nu", "sup_ratio"], rows)
    checks = [Check("envelope_sup_ratio", rep.sup_ratio <= 3.0, rep.sup_ratio, "<= 3")]
    dual = max(
        abs(bessel_mod.bessel_j(nu, r, "series").value
            - bessel_mod.bessel_j(nu, r, "schlafli").value)
        for nu, r in ((5.0, 12.0), (2.0, 15.0), (0.5, 11.0))
    )
    checks.append(Check("dual_method_agreement", dual <= 1e-9, dual, "<= 1e-9"))
    worst = 0.0
    for nu in (11.0, 20.0, 50.0):
        if nu > p["numax"]:
            continue
        lo = nu + 1.1 * nu ** (1.0 / 3.0)
        for r in np.logspace(np.log10(lo), np.log10(min(50 * nu, p["rmax"])), 8):
            worst = max(worst, bessel_mod.bessel_asymptotic_decomp(nu, r).ratio)
    checks.append(Check("asymptotic_remainder", worst <= 5.0, worst, "<= 5x envelope"))
    return checks, ["bessel_envelope.csv"], {}


def _initial_bump(grid: RadialGrid, delta: float, sigma: float) -> dyn.GPState:
    return dyn.GPState(0.0, gaussian_field(grid, sigma=sigma, amplitude=delta),
                       zero_field(grid))


def _run_evolve(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    grid = RadialGrid(p["n"], p["rmax"])
    state = _initial_bump(grid, p["delta"], p["sigma"])
    traj = dyn.evolve(state, p["dt"], p["steps"], p["scheme"],
                      record_every=p["snapshot_every"])
    rows = [(t, e.e_total, e.e_kinetic, e.e_potential, e.l2_mass)
            for t, e in zip(traj.times, traj.energies)]
    write_csv(outdir / "energy.csv", ["t", "E", "e_kin", "e_pot", "l2_mass"], rows)
    names = ["energy.csv"]
    if p["write_snapshots"]:
        for t, st in zip(traj.times, traj.states):
            name = f"snapshot_{t:012.6f}.fld"
            u = st.u1.with_data(st.u1.data.real + 1j * st.u2.data.real)
            write_snapshot(outdir / name, u, t=t)
            names.append(name)
    e0 = traj.energies[0].e_total
    drift = (max(abs(e.e_total - e0) for e in traj.energies) / e0 if e0 > 0 else 0.0)
    moved = dyn.linear_propagator(state, 1.0)
    v0 = l2_norm(dyn.linear_diagonalization(state).m)
    v1 = l2_norm(dyn.linear_diagonalization(moved).m)
    unit = abs(v1 - v0) / v0 if v0 > 0 else 0.0
    checks = [
        Check("energy_drift", drift <= p["drift_tol"], drift,
              f"<= {p['drift_tol']:g} relative"),
        Check("propagator_unitarity", unit <= 1e-12, unit, "<= 1e-12"),
    ]
    return checks, names, {"energy_drift": drift}


def _run_normalform_verify(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    grid = RadialGrid(p["n"], p["rmax"])
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    identity_err = 0.0
    for _ in range(p["trials"]):
        st = dyn.random_state(grid, rng, p["amplitude"], -1, 2)
        a = dyn.compute_N31(st, "defining")
        b = dyn.compute_N31(st, "expanded")
        identity_err = max(identity_err,
                           l2_norm(a - b) / max(l2_norm(a), 1e-300))
    sign_state = dyn.random_state(grid, rng, 2.0, -1, 1,
                                  envelope_sigma=grid.r_max / 12.0)
    orders = dyn.richardson_orders(sign_state, dyn.FROZEN_CONVENTION,
                                   h0=p["h0"], halvings=p["halvings"])
    conv_res = dyn.verify_m_derivation(
        sign_state, dyn.FROZEN_CONVENTION, p["h0"] / 2 ** p["halvings"]).relative
    plateaus = {}
    for name, conv in (
        ("s_n3", dyn.SignConvention(s_n3=+1)),
        ("s_n4", dyn.SignConvention(s_n4=+1)),
        ("s_n5", dyn.SignConvention(s_n5=-1)),
    ):
        flipped = dyn.verify_m_derivation(
            sign_state, conv, p["h0"] / 2 ** p["halvings"]).relative
        plateaus[name] = flipped / conv_res if conv_res > 0 else np.inf
    quint = dyn.verify_quintic_cancellation(1)
    payload = {
        "identity_err": identity_err,
        "residual_orders": orders,
        "quintic_sum": str(quint.total),
        "quintic_paths": [str(quint.from_substitution), str(quint.from_quintic_block)],
        "sign_convention": {
            "s_n3": dyn.FROZEN_CONVENTION.s_n3,
            "s_n4": dyn.FROZEN_CONVENTION.s_n4,
            "s_n5": dyn.FROZEN_CONVENTION.s_n5,
            "c_n5c": str(dyn.FROZEN_CONVENTION.c_n5c),
        },
        "flip_plateau_factors": plateaus,
    }
    _atomic_write(outdir / "normalform_report.json",
                  json.dumps(payload, indent=2, sort_keys=True).encode())
    checks = [
        Check("cancellation_identity", identity_err <= 1e-9, identity_err, "<= 1e-9"),
        Check("residual_order", all(abs(r - 4.0) <= 0.5 for r in orders),
              min(orders), "ratios 4 +- 0.5"),
        Check("quintic_sum", quint.total == 0, float(quint.total), "exactly 0"),
        Check("sign_plateaus", all(v > 100.0 for v in plateaus.values()),
              min(plateaus.values()), "> 100x converged residual"),
    ]
    return checks, ["normalform_report.json"], payload


def _run_scatter(cfg: ExperimentConfig, outdir: Path):
    p = cfg.params
    grid = RadialGrid(p["n"], p["rmax"])
    state = _initial_bump(grid, p["delta"], p["sigma"])
    steps = int(round(p["tmax"] / p["dt"]))
    every = max(1, steps // p["snapshots"])
    traj = dyn.evolve(state, p["dt"], steps, "strang", record_every=every)
    keep = [st for st in traj.states if st.t >= p["tmin"] - 1e-12]
    rep = dyn.scattering_profile(keep)
    times = rep.times[: len(rep.cauchy_full)]
    rows = list(zip(times, rep.cauchy_full, rep.cauchy_variant,
                    rep.quadratic_decay[: len(times)]))
    write_csv(outdir / "cauchy.csv",
              ["t_cutoff", "cauchy_full", "cauchy_variant", "quad_decay"], rows)
    mono = bool(np.all(np.diff(rep.cauchy_full) <= 1e-15))
    final_ok = rep.cauchy_full[-1] <= 0.02 * rep.m0_h1
    decay_ok = rep.quadratic_decay[-1] < rep.quadratic_decay[0]
    free = dyn.evolve(state, p["dt"], max(1, steps // 10), "strang",
                      record_every=max(1, steps // 40), nonlinear=False)
    frep = dyn.scattering_profile(free.states, include_quadratic=False)
    free_const = frep.cauchy_full.max() <= 1e-12 * max(frep.m0_h1, 1e-300)
    checks = [
        Check("cauchy_monotone", mono, "monotone" if mono else "not monotone",
              "nonincreasing in cutoff"),
        Check("cauchy_final", final_ok, rep.cauchy_full[-1] / rep.m0_h1,
              "<= 0.02 * ||m(0)||"),
        Check("quadratic_decay", bool(decay_ok),
              rep.quadratic_decay[-1] / rep.quadratic_decay[0], "decreasing"),
        Check("free_flow_constancy", bool(free_const),
              frep.cauchy_full.max() / max(frep.m0_h1, 1e-300), "<= 1e-12"),
    ]
    return checks, ["cauchy.csv"], {"m0_h1": rep.m0_h1}


EXPERIMENTS = {
    "symbol-check": {
        "runner": _run_symbol_check,
        "schema": {
            "name": Param(str, "gp", choices=("gp", "schrodinger", "klein_gordon",
                                              "beam", "fourth_order")),
            "params": Param(str, "[]"),
            "kmin": Param(int, -8, lo=-30, hi=30),
            "kmax": Param(int, 8, lo=-30, hi=30),
            "grid_points": Param(int, 256, lo=64, hi=100000),
        },
    },
    "strichartz-scan": {
        "runner": _run_strichartz_scan,
        "schema": {
            "qr": Param(str, "2:5,2:6,inf:2"),
            "kmin": Param(int, -5, lo=-8, hi=8),
            "kmax": Param(int, 5, lo=-8, hi=8),
            "profile": Param(str, "band_gaussian",
                             choices=("band_gaussian", "band_indicator")),
            "nt": Param(int, 512, lo=64, hi=8192),
            "window_cap": Param(float, 1e4, lo=1.0, hi=1e6),
        },
    },
    "kernel-decay": {
        "runner": _run_kernel_decay,
        "schema": {
            "symbol": Param(str, "gp"),
            "params": Param(str, "[]"),
            "k": Param(int, 2, lo=-10, hi=10),
            "tmin": Param(float, 10.0, lo=1e-3),
            "tmax": Param(float, 1e3, lo=1e-3, hi=1e7),
            "points": Param(int, 16, lo=8, hi=256),
            "tol": Param(float, 1e-12, lo=1e-12, hi=1e-6),
        },
    },
    "bessel-check": {
        "runner": _run_bessel_check,
        "schema": {
            "numax": Param(float, 50.0, lo=0.5, hi=200.0),
            "rmax": Param(float, 1e4, lo=10.0, hi=1e5),
            "points": Param(int, 48, lo=16, hi=512),
        },
    },
    "evolve": {
        "runner": _run_evolve,
        "schema": {
            "n": Param(int, 1024, lo=64, hi=1 << 15),
            "rmax": Param(float, 100.0, lo=1.0, hi=1e6),
            "dt": Param(float, 5e-4, lo=1e-7, hi=1.0),
            "steps": Param(int, 2000, lo=1, hi=10**7),
            "delta": Param(float, 0.05, lo=0.0, hi=10.0),
            "sigma": Param(float, 2.0, lo=0.1, hi=100.0),
            "scheme": Param(str, "strang", choices=("strang", "rk4_full")),
            "snapshot_every": Param(int, 500, lo=1, hi=10**7),
            "write_snapshots": Param(bool, True),
            "drift_tol": Param(float, 1e-6, lo=0.0),
        },
    },
    "normalform-verify": {
        "runner": _run_normalform_verify,
        "schema": {
            "trials": Param(int, 10, lo=1, hi=1000),
            "n": Param(int, 512, lo=128, hi=1 << 14),
            "rmax": Param(float, 60.0, lo=10.0, hi=1e4),
            "amplitude": Param(float, 0.25, lo=1e-4, hi=5.0),
            "h0": Param(float, 2e-4, lo=1e-6, hi=0.1),
            "halvings": Param(int, 3, lo=1, hi=8),
        },
    },
    "scatter": {
        "runner": _run_scatter,
        "schema": {
            "delta": Param(float, 0.01, lo=0.0, hi=1.0),
            "tmax": Param(float, 50.0, lo=1.0, hi=1e4),
            "tmin": Param(float, 5.0, lo=0.0, hi=1e4),
            "dt": Param(float, 0.01, lo=1e-5, hi=1.0),
            "n": Param(int, 2048, lo=256, hi=1 << 15),
            "rmax": Param(float, 256.0, lo=10.0, hi=1e5),
            "sigma": Param(float, 2.0, lo=0.1, hi=100.0),
            "snapshots": Param(int, 24, lo=4, hi=512),
        },
    },
}


def run(config: ExperimentConfig) -> RunReport:
    """Execute one experiment; writes outputs plus report.json atomically."""
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    runner = EXPERIMENTS[config.experiment]["runner"]
    checks, names, extra = runner(config, outdir)
    wall = time.perf_counter() - t0
    report = RunReport(config.echo(), __version__, wall, checks,
                       _manifest(outdir, names), extra)
    _atomic_write(outdir / "report.json",
                  json.dumps(report.as_dict(), indent=2, sort_keys=True).encode())
    return report


# ---------------------------------------------------------------------------
# Plot-data emission
# ---------------------------------------------------------------------------

def emit_plotdata(outdir, kind: str) -> list[str]:
    """Write two-column plot files plus a rendered image for a finished run.

    kind 'slope' reads the mixed-norm scan, 'decay' the kernel scan,
    'cauchy' the scattering indicator, 'energy' the conservation series.
    Log-log axes wherever the underlying check is a slope.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)

    def _read_csv(name):
        path = outdir / name
        if not path.exists():
            raise ConfigError(f"missing series: {name} not found in {outdir}")
        rows = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
        header = rows[0].split(",")
        body = [ln.split(",") for ln in rows[1:] if ln]
        return header, body

    written: list[str] = []

    def _save(fig, stem):
        png = outdir / f"{stem}.png"
        fig.savefig(png, dpi=110)
        plt.close(fig)
        written.append(str(png))

    if kind == "slope":
        header, body = _read_csv("strichartz_scan.csv")
        groups: dict = {}
        for row in body:
            groups.setdefault((row[1], row[2]), []).append(
                (int(row[0]), float(row[3])))
        fig, ax = plt.subplots(figsize=(6, 4.2))
        for (q, r), pts in sorted(groups.items()):
            pts.sort()
            ks = [p[0] for p in pts]
            ms = [p[1] for p in pts]
            dat = outdir / f"slope_{q}_{r}.dat".replace(":", "-")
            _atomic_write(dat, "".join(
                f"{k} {FLOAT_FMT % m}\n" for k, m in zip(ks, ms)).encode())
            written.append(str(dat))
            ax.semilogy(ks, ms, "o-", base=2, label=f"(q,r)=({q},{r})")
        ax.set_xlabel("band k")
        ax.set_ylabel("measured mixed norm")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        _save(fig, "slope")
        return written

    if kind == "decay":
        header, body = _read_csv("kernel_decay.csv")
        t = np.array([float(r[0]) for r in body])
        st = np.array([float(r[1]) for r in body])
        far = np.array([float(r[2]) for r in body])
        dat = outdir / "decay.dat"
        _atomic_write(dat, "".join(
            f"{FLOAT_FMT % a} {FLOAT_FMT % b} {FLOAT_FMT % c}\n"
            for a, b, c in zip(t, st, far)).encode())
        written.append(str(dat))
        fig, ax = plt.subplots(figsize=(6, 4.2))
        ax.loglog(t, st, "o-", label="stationary window")
        ax.loglog(t, far, "s-", label="far window")
        keep = st > 0
        fit = np.polyfit(np.log(t[keep]), np.log(st[keep]), 1)
        ax.loglog(t, np.exp(fit[1]) * t ** fit[0], "--",
                  label=f"fit slope {fit[0]:+.2f}")
        ax.set_xlabel("t")
        ax.set_ylabel("sup |K|")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        _save(fig, "decay")
        return written

    if kind == "cauchy":
        header, body = _read_csv("cauchy.csv")
        t = [float(r[0]) for r in body]
        c1 = [float(r[1]) for r in body]
        c2 = [float(r[2]) for r in body]
        dat = outdir / "cauchy.dat"
        _atomic_write(dat, "".join(
            f"{FLOAT_FMT % a} {FLOAT_FMT % b} {FLOAT_FMT % c}\n"
            for a, b, c in zip(t, c1, c2)).encode())
        written.append(str(dat))
        fig, ax = plt.subplots(figsize=(6, 4.2))
        ax.semilogy(t, c1, "o-", label="full transform")
        ax.semilogy(t, c2, "s-", label="variant transform")
        ax.set_xlabel("cutoff time")
        ax.set_ylabel("Cauchy indicator")
        ax.legend()
        ax.grid(True, alpha=0.3)
        _save(fig, "cauchy")
        return written

    if kind == "energy":
        header, body = _read_csv("energy.csv")
        t = np.array([float(r[0]) for r in body])
        e = np.array([float(r[1]) for r in body])
        mass = np.array([float(r[4]) for r in body])
        dat = outdir / "energy.dat"
        _atomic_write(dat, "".join(
            f"{FLOAT_FMT % a} {FLOAT_FMT % b} {FLOAT_FMT % c}\n"
            for a, b, c in zip(t, e, mass)).encode())
        written.append(str(dat))
        fig, axes = plt.subplots(2, 1, figsize=(6, 5.6), sharex=True)
        if e[0] > 0:
            axes[0].plot(t, (e - e[0]) / e[0], "-")
        else:
            axes[0].plot(t, e, "-")
        axes[0].set_ylabel("relative energy drift")
        axes[1].plot(t, mass, "-")
        axes[1].set_ylabel("mass")
        axes[1].set_xlabel("t")
        for ax in axes:
            ax.grid(True, alpha=0.3)
        _save(fig, "energy")
        return written

    raise ConfigError(f"unknown plot kind {kind!r}")
