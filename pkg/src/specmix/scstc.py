"""
Monte Carlo sweeps that turn error-rate statements into measurable slopes.

A sweep varies one model parameter over a grid, runs seeded trials at every
grid point, and fits ``log(error)`` against ``log(parameter)``. Trial ``t``
uses the same derived seed at every grid point (common random numbers), so
the whole record table is a pure function of the :class:`SweepConfig`.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np
from threadpoolctl import threadpool_limits

from . import netmodels as nm
from .errors import ConfigRejected, InvalidArgument, SpecmixError
from .estimators import spacl, svmcone_dcmm
from .metrics import (
    eigenspace_error,
    instance_diagnostics,
    is_connected,
    membership_error,
    spectral_deviation,
)
from .numlin import sym_eigen_topk

__all__ = [
    "SweepConfig",
    "TrialRecord",
    "SlopeFit",
    "SweepResult",
    "ThresholdResult",
    "CSV_HEADER",
    "SEPARATION_BAND",
    "SPARSITY_BAND",
    "BETA_BAND",
    "resolve_threads",
    "run_sweep",
    "sweep_sparsity",
    "sweep_separation",
    "sweep_beta",
    "threshold_scan",
    "fit_loglog_slope",
    "fit_from_records",
    "scstc_report",
]

log = logging.getLogger(__name__)

CSV_HEADER = (
    "param", "value", "trial", "seed", "max_l1_error", "mean_l1_error",
    "eig_error", "dev_ratio", "connected", "sigma_k_p", "lambda_k_gram",
    "lambda_1_gram", "pi_min", "theta_max", "theta_min",
)

SPARSITY_BAND = (-0.65, -0.35)
SEPARATION_BAND = (-1.25, -0.75)
BETA_BAND = (-1.3, -0.7)
CROSSING_BAND = (0.5, 2.0)

PARAMS = ("rho", "omega", "beta", "n")


@dataclass(frozen=True)
class SweepConfig:
    """One-parameter Monte Carlo sweep.

    ``param`` names the swept quantity; the remaining model parameters are
    held at the fixed values below. Under DCMM, ``theta = sqrt(rho) *
    Uniform[theta_lo, 1]``. ``beta`` (when set) switches the mixing matrix
    from the ``omega`` family to the off-diagonal ``beta`` family.

    ``planted`` = ``(c, exponent)`` skips graph generation entirely and
    records ``c * x ** exponent`` as both error columns; it exists to test
    the fitting and output plumbing.
    """

    param: str
    grid: tuple
    model: str = "mmsb"
    estimator: str = "spacl"
    n: int = 1000
    K: int = 2
    trials: int = 30
    seed: int = 0
    rho: float = 0.1
    omega: float = 0.9
    beta: float | None = None
    theta_lo: float = 0.5
    frac_pure: float = 0.5
    dirichlet_a: float = 1.0
    alpha: float = 1.0
    record_eig: bool = False
    record_dev: bool = False
    record_connected: bool = False
    planted: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        if self.planted is not None:
            object.__setattr__(self, "planted", tuple(float(p) for p in self.planted))

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigRejected(f"unknown config fields: {sorted(unknown)}",
                                 field=sorted(unknown)[0])
        return cls(**d)

    def to_dict(self):
        d = asdict(self)
        d["grid"] = list(self.grid)
        if self.planted is not None:
            d["planted"] = list(self.planted)
        return d

    def point(self, value):
        """Fixed parameters with the swept one set to ``value``."""
        if self.param == "n":
            return replace(self, n=int(round(value)))
        return replace(self, **{self.param: float(value)})

    def validate(self):
        """Reject malformed configs and grid points that violate the sparsity gates."""
        if self.param not in PARAMS:
            raise ConfigRejected(f"param must be one of {PARAMS}", "param", self.param)
        if self.model not in ("mmsb", "dcmm"):
            raise ConfigRejected("model must be 'mmsb' or 'dcmm'", "model", self.model)
        if self.estimator not in ("spacl", "svmcone"):
            raise ConfigRejected("estimator must be 'spacl' or 'svmcone'",
                                 "estimator", self.estimator)
        g = np.asarray(self.grid)
        if g.size < 3:
            raise ConfigRejected(f"grid needs at least 3 points, got {g.size}", "grid")
        if np.any(np.diff(g) <= 0):
            raise ConfigRejected("grid must be strictly increasing", "grid")
        if self.trials < 1:
            raise ConfigRejected("trials must be >= 1", "trials", self.trials)
        if self.param == "beta" and np.any(g <= 2):
            bad = float(g[g <= 2][0])
            raise ConfigRejected(f"beta grid value {bad} must exceed 2", "grid", bad)
        if self.planted is not None:
            if np.any(g <= 0):
                raise ConfigRejected("planted sweeps need a positive grid", "grid")
            return self
        for value in self.grid:
            self.point(value)._validate_point(value)
        return self

    def _validate_point(self, value):
        def reject(msg):
            raise ConfigRejected(f"{self.param}={value:g}: {msg}", self.param, value)

        if self.K < 1 or self.n < self.K:
            reject(f"need 1 <= K <= n (n={self.n}, K={self.K})")
        try:
            P = self.ptilde()
        except InvalidArgument as exc:
            reject(str(exc))
        if not 0.0 < self.rho <= 1.0:
            reject(f"rho={self.rho} outside (0, 1]")
        if self.model == "mmsb":
            if self.rho * P.max() > 1:
                reject("rho * max(P) exceeds 1 (invalid probability)")
            if not nm.sparsity_gate(self.rho, self.n):
                reject(f"rho * n = {self.rho * self.n:.4g} < log(n) = {math.log(self.n):.4g}")
        else:
            if not np.allclose(np.diag(P), 1.0):
                reject("DCMM needs a unit-diagonal mixing matrix")
            theta_max = math.sqrt(self.rho)
            if theta_max * P.max() > 1:
                reject(f"theta_max * max(P) = {theta_max * P.max():.4g} exceeds 1")
            # smallest value the realized max(P) * theta_max * ||theta||_1 can take
            low = math.sqrt(self.rho) * self.theta_lo
            if P.max() * low * (self.n * low) < math.log(self.n):
                reject("degree gate max(P) * theta_max * ||theta||_1 >= log(n) can fail")

    def ptilde(self):
        if self.beta is not None:
            return nm.build_ptilde_offdiag(self.K, self.beta)
        return nm.build_ptilde_standard(self.K, self.omega)

    def x_value(self, value):
        """Abscissa for the log-log fit (``beta - 2`` for beta sweeps)."""
        return value - 2.0 if self.param == "beta" else value


class TrialRecord(NamedTuple):
    param: str
    value: float
    trial: int
    seed: int
    max_l1_error: float
    mean_l1_error: float
    eig_error: float | None = None
    dev_ratio: float | None = None
    connected: bool | None = None
    sigma_k_p: float | None = None
    lambda_k_gram: float | None = None
    lambda_1_gram: float | None = None
    pi_min: float | None = None
    theta_max: float | None = None
    theta_min: float | None = None
    failure: str | None = None


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    points: int


@dataclass
class SweepResult:
    config: SweepConfig
    records: list
    fit: SlopeFit
    summary: list = field(default_factory=list)

    @property
    def failures(self):
        return [r for r in self.records if r.failure is not None]


class ThresholdResult(NamedTuple):
    n: int
    c_grid: tuple
    p: tuple
    frequencies: tuple
    connected: np.ndarray  # trials x len(c_grid) booleans

    def crossing(self, level=0.5):
        for c, f in zip(self.c_grid, self.frequencies):
            if f >= level:
                return c
        return None

    def is_monotone(self):
        return bool(np.all(np.diff(self.connected.astype(int), axis=1) >= 0))


def resolve_threads(threads=None):
    """Worker count: explicit value, capped by ``SPECMIX_THREADS`` when set."""
    cap = os.environ.get("SPECMIX_THREADS")
    n = int(threads) if threads else 1
    if cap:
        n = min(n, int(cap)) if threads else int(cap)
    return max(1, n)


def run_trial(cfg, value, trial):
    """One seeded measurement at grid point ``value``."""
    seed = nm.derive_seed(cfg.seed, trial)
    base = dict(param=cfg.param, value=float(value), trial=int(trial), seed=seed)
    if cfg.planted is not None:
        c, exponent = cfg.planted
        err = c * cfg.x_value(value) ** exponent
        return TrialRecord(max_l1_error=err, mean_l1_error=err, **base)

    pt = cfg.point(value)
    P = pt.ptilde()
    Pi = nm.sample_membership(pt.n, pt.K, pt.frac_pure, pt.dirichlet_a,
                              seed=nm.derive_seed(seed, 0))
    if pt.model == "mmsb":
        pop = nm.omega_mmsb(pt.rho, P, Pi)
        diag = instance_diagnostics(Pi, P, rho=pt.rho)
    else:
        theta = nm.sample_theta(pt.n, pt.rho, pt.theta_lo, seed=nm.derive_seed(seed, 1))
        pop = nm.omega_dcmm(theta, P, Pi)
        diag = instance_diagnostics(Pi, P, theta=theta)
    A = nm.sample_adjacency(pop, nm.derive_seed(seed, 2))
    diag_fields = {k: diag[k] for k in ("sigma_k_p", "lambda_k_gram", "lambda_1_gram",
                                         "pi_min", "theta_max", "theta_min")}
    extra = {}
    if pt.record_dev:
        extra["dev_ratio"] = spectral_deviation(A, pop, pt.alpha).ratio
    if pt.record_connected:
        extra["connected"] = is_connected(A)
    try:
        if pt.estimator == "spacl":
            est = spacl(A, pt.K)
        else:
            est = svmcone_dcmm(A, pt.K, seed=nm.derive_seed(seed, 3))
    except SpecmixError as exc:
        log.warning("trial %d at %s=%g failed: %s", trial, cfg.param, value, exc)
        return TrialRecord(max_l1_error=math.nan, mean_l1_error=math.nan,
                           failure=f"{type(exc).__name__}: {exc}",
                           **base, **extra, **diag_fields)
    report = membership_error(est.rows, Pi)
    if pt.record_eig:
        U = sym_eigen_topk(pop.omega, pt.K).vectors
        extra["eig_error"] = eigenspace_error(est.eigenvectors, U).value
    return TrialRecord(max_l1_error=report.max_l1_error,
                       mean_l1_error=report.mean_l1_error,
                       **base, **extra, **diag_fields)


def _run_task(args):
    cfg, value, trial = args
    with threadpool_limits(limits=1):
        return run_trial(cfg, value, trial)


def _run_all(cfg, threads):
    tasks = [(cfg, v, t) for v in cfg.grid for t in range(cfg.trials)]
    workers = resolve_threads(threads)
    if workers == 1:
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    order = {v: i for i, v in enumerate(cfg.grid)}
    records.sort(key=lambda r: (order[r.value], r.trial))
    return records


def fit_loglog_slope(points):
    """Least-squares line through ``(log x, log y)``.

    Raises
    ------
    InvalidArgument
        With fewer than three points or any nonpositive coordinate.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise InvalidArgument("need at least three (x, y) points")
    if np.any(~np.isfinite(pts)) or np.any(pts <= 0):
        raise InvalidArgument("log-log fit needs positive, finite coordinates")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    xm, ym = lx.mean(), ly.mean()
    sxx = np.sum((lx - xm) ** 2)
    if sxx == 0:
        raise InvalidArgument("x values must not all coincide")
    slope = float(np.sum((lx - xm) * (ly - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((ly - (intercept + slope * lx)) ** 2))
    ss_tot = float(np.sum((ly - ym) ** 2))
    r2 = 1.0 if ss_tot <= 1e-30 else max(0.0, 1.0 - ss_res / ss_tot)
    return SlopeFit(slope, intercept, min(r2, 1.0), int(pts.shape[0]))


def _summarize(cfg, records):
    n_log = {}
    rows = []
    for value in cfg.grid:
        recs = [r for r in records if r.value == value and r.failure is None]
        errs = np.array([r.mean_l1_error for r in recs])
        maxs = np.array([r.max_l1_error for r in recs])
        pt = cfg.point(value)
        row = {
            cfg.param: value,
            "x": cfg.x_value(value),
            "trials_ok": len(recs),
            "mean_l1_error": float(errs.mean()) if errs.size else math.nan,
            "max_l1_error": float(maxs.mean()) if maxs.size else math.nan,
        }
        if cfg.planted is None and cfg.beta is None and cfg.model == "mmsb":
            n = pt.n
            logn = n_log.setdefault(n, math.log(n))
            row["separation_stat"] = pt.omega * math.sqrt(pt.rho)
            row["alt_separation_stat"] = pt.omega * math.sqrt(pt.rho * n / logn)
            row["separation_reference"] = math.sqrt(logn / n)
        rows.append(row)
    return rows


def fit_from_records(cfg, records):
    """Log-log fit of the trial-averaged ``mean_l1_error`` against the swept parameter."""
    summary = _summarize(cfg, records)
    return fit_loglog_slope([(row["x"], row["mean_l1_error"]) for row in summary]), summary


def run_sweep(cfg, threads=None):
    """Validate ``cfg``, run every (grid value, trial) and fit the slope."""
    cfg.validate()
    records = _run_all(cfg, threads)
    fit, summary = fit_from_records(cfg, records)
    return SweepResult(cfg, records, fit, summary)


def _require(cfg, param):
    if cfg.param != param:
        raise ConfigRejected(f"expected a '{param}' sweep, got '{cfg.param}'", "param", cfg.param)


def sweep_sparsity(cfg, threads=None):
    """Error against ``rho``; the expected slope is about -1/2."""
    _require(cfg, "rho")
    return run_sweep(cfg, threads)


def sweep_separation(cfg, threads=None):
    """Error against ``omega`` (the smallest singular value of P); slope about -1."""
    _require(cfg, "omega")
    if cfg.beta is not None:
        raise ConfigRejected("separation sweeps use the omega family; unset beta", "beta")
    return run_sweep(cfg, threads)


def sweep_beta(cfg, threads=None):
    """Error against ``beta - 2`` for the off-diagonal mixing family; slope about -1."""
    _require(cfg, "beta")
    return run_sweep(cfg, threads)


def threshold_scan(n, c_grid, trials, seed, threads=None):
    """Fraction of connected G(n, c log(n) / n) graphs for each multiplier ``c``.

    Trial ``t`` reuses one seed across the whole grid, so its edge sets are
    nested and its connectivity is monotone in ``c``.
    """
    n = int(n)
    c_grid = tuple(float(c) for c in c_grid)
    if not c_grid or any(c < 0 for c in c_grid):
        raise ConfigRejected("c_grid must hold nonnegative multipliers", "c_grid")
    if any(np.diff(c_grid) <= 0):
        raise ConfigRejected("c_grid must be strictly increasing", "c_grid")
    if trials < 1:
        raise ConfigRejected("trials must be >= 1", "trials", trials)
    scale = math.log(n) / n if n > 1 else 0.0
    ps = []
    for c in c_grid:
        p = c * scale
        if p > 1.0:
            raise ConfigRejected(f"c={c:g} gives p={p:.4g} > 1", "c_grid", c)
        ps.append(p)
    tasks = [(n, tuple(ps), nm.derive_seed(seed, t)) for t in range(trials)]
    workers = resolve_threads(threads)
    if workers == 1:
        rows = [_threshold_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_threshold_trial, tasks))
    flags = np.array(rows, dtype=bool).reshape(trials, len(c_grid))
    freqs = tuple(float(f) for f in flags.mean(axis=0))
    return ThresholdResult(n, c_grid, tuple(ps), freqs, flags)


def _threshold_trial(args):
    n, ps, seed = args
    return [is_connected(nm.sample_er(n, p, seed)) for p in ps]


def _band_status(value, band):
    return "PASS" if band[0] <= value <= band[1] else "FLAG"


def scstc_report(sparsity, separation, threshold):
    """Four-step verdict from the two slope fits and the threshold scan.

    ``threshold`` is a :class:`ThresholdResult` or a ``{c: frequency}``
    mapping. Returns a dict with per-check and per-step PASS/FLAG entries and
    a ``text`` rendering.
    """
    if sparsity is None or separation is None or threshold is None:
        raise InvalidArgument("sparsity fit, separation fit and threshold data are all required")
    if isinstance(threshold, ThresholdResult):
        freq = dict(zip(threshold.c_grid, threshold.frequencies))
    else:
        freq = {float(c): float(f) for c, f in dict(threshold).items()}
    if not freq:
        raise InvalidArgument("threshold data is empty")
    cs = sorted(freq)
    crossing = next((c for c in cs if freq[c] >= 0.5), None)
    cross_ok = crossing is not None and CROSSING_BAND[0] <= crossing <= CROSSING_BAND[1]

    checks = {
        "sparsity_slope": {
            "value": sparsity.slope, "band": list(SPARSITY_BAND),
            "r_squared": sparsity.r_squared,
            "status": _band_status(sparsity.slope, SPARSITY_BAND),
        },
        "separation_slope": {
            "value": separation.slope, "band": list(SEPARATION_BAND),
            "r_squared": separation.r_squared,
            "status": _band_status(separation.slope, SEPARATION_BAND),
        },
        "threshold_crossing": {
            "value": crossing, "band": list(CROSSING_BAND),
            "frequencies": {f"{c:g}": freq[c] for c in cs},
            "status": "PASS" if cross_ok else "FLAG",
        },
    }
    steps = [
        {"step": 1, "status": "PASS",
         "detail": "error rate carries the separation parameter sigma_K(P) (omega sweep present)"},
        {"step": 2, "status": "PASS",
         "detail": "standard network: K fixed, P = omega*I + (1-omega)*11', balanced memberships"},
        {"step": 3, "status": checks["separation_slope"]["status"],
         "detail": (f"separation slope {separation.slope:.3f} vs band {list(SEPARATION_BAND)}; "
                    f"sparsity slope {sparsity.slope:.3f} vs band {list(SPARSITY_BAND)}")},
        {"step": 4, "status": checks["threshold_crossing"]["status"],
         "detail": (f"connectivity crosses 1/2 at c={crossing} (p = c log(n)/n); "
                    f"band {list(CROSSING_BAND)}")},
    ]
    lines = ["SCSTC verdict"]
    for name, chk in checks.items():
        value = chk["value"]
        shown = f"{value:.4g}" if isinstance(value, float) else str(value)
        lines.append(f"  {chk['status']:4s}  {name}: {shown} (band {chk['band']})")
    for s in steps:
        lines.append(f"  step {s['step']}: {s['status']:4s}  {s['detail']}")
    return {"checks": checks, "steps": steps, "text": "\n".join(lines)}
