"""Command-line entry point: ``specmix {generate,estimate,sweep,threshold,report}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from . import netmodels as nm
from .errors import ConfigRejected, SpecmixError
from .estimators import spacl, svmcone_dcmm
from .metrics import membership_error
from .scstc import (
    SweepConfig,
    fit_loglog_slope,
    run_sweep,
    scstc_report,
    threshold_scan,
)
from .svgplot import loglog_svg

log = logging.getLogger("specmix")


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merge(base, args, mapping):
    """Overlay non-None flag values onto the config dict."""
    out = dict(base)
    for flag, key in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = value
    return out


def _need_seed(cfg):
    if cfg.get("seed") is None:
        raise ConfigRejected("a seed is mandatory (--seed or 'seed' in the config)", "seed")


# -- generate ---------------------------------------------------------------

GEN_FLAGS = {
    "model": "model", "n": "n", "k": "K", "rho": "rho", "omega": "omega",
    "beta": "beta", "theta_lo": "theta_lo", "frac_pure": "frac_pure",
    "dirichlet_a": "dirichlet_a", "seed": "seed",
}


def cmd_generate(args):
    cfg = {"model": "mmsb", "frac_pure": 0.5, "dirichlet_a": 1.0, "theta_lo": 0.5,
           "omega": 0.9, "beta": None}
    cfg.update(_merge(_load_config(args.config), args, GEN_FLAGS))
    _need_seed(cfg)
    for key in ("n", "K", "rho"):
        if cfg.get(key) is None:
            raise ConfigRejected(f"missing required parameter '{key}'", key)
    n, K, seed = int(cfg["n"]), int(cfg["K"]), int(cfg["seed"])
    if cfg["beta"] is not None:
        P = nm.build_ptilde_offdiag(K, cfg["beta"])
    else:
        P = nm.build_ptilde_standard(K, cfg["omega"])
    Pi = nm.sample_membership(n, K, cfg["frac_pure"], cfg["dirichlet_a"],
                              seed=nm.derive_seed(seed, 0))
    theta = None
    if cfg["model"] == "mmsb":
        pop = nm.omega_mmsb(cfg["rho"], P, Pi)
    elif cfg["model"] == "dcmm":
        theta = nm.sample_theta(n, cfg["rho"], cfg["theta_lo"], seed=nm.derive_seed(seed, 1))
        pop = nm.omega_dcmm(theta, P, Pi)
    else:
        raise ConfigRejected(f"unknown model {cfg['model']!r}", "model")
    A = nm.sample_adjacency(pop, nm.derive_seed(seed, 2))
    manifest = {k: cfg[k] for k in ("model", "rho", "omega", "beta", "frac_pure",
                                     "dirichlet_a", "seed")}
    manifest.update(n=n, K=K)
    if theta is not None:
        manifest["theta_lo"] = cfg["theta_lo"]
    out = io.write_bundle(args.out, A, Pi, manifest, theta)
    print(out)


# -- estimate ---------------------------------------------------------------

def cmd_estimate(args):
    truth = None
    if args.bundle:
        bundle = Path(args.bundle)
        A = io.read_edge_list(bundle / io.EDGES)
        if (bundle / io.MEMBERSHIP).exists():
            truth = io.read_membership(bundle / io.MEMBERSHIP)
    elif args.edges:
        A = io.read_edge_list(args.edges)
    else:
        raise ConfigRejected("pass --edges or --bundle", "edges")
    if args.truth:
        truth = io.read_membership(args.truth)
    if args.algo == "spacl":
        est = spacl(A, args.k)
    else:
        if args.seed is None:
            raise ConfigRejected("svmcone needs --seed", "seed")
        est = svmcone_dcmm(A, args.k, seed=args.seed)
    io.write_membership(args.out, est.rows)
    diag = {
        "algo": args.algo, "K": args.k, "corners": [int(i) for i in est.corners],
        "corner_cond": est.corner_cond, "n_clipped": est.n_clipped,
        "n_fallback": est.n_fallback, "n_negative_scale": est.n_negative_scale,
        "eigenvalues": [float(v) for v in est.eigenvalues],
    }
    with open(str(args.out) + ".diag.json", "w", newline="\n") as fh:
        json.dump(diag, fh, indent=2)
        fh.write("\n")
    if truth is not None:
        report = membership_error(est.rows, truth)
        scores = Path(args.scores) if args.scores else Path(str(args.out) + ".scores.csv")
        new = not scores.exists()
        with open(scores, "a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(["algo", "K", "max_l1_error", "mean_l1_error", "permutation", "exact"])
            w.writerow([args.algo, args.k, io.fmt(report.max_l1_error),
                        io.fmt(report.mean_l1_error),
                        " ".join(str(p) for p in report.permutation), int(report.exact)])
    print(args.out)


# -- sweep ------------------------------------------------------------------

SWEEP_FLAGS = {
    "param": "param", "grid": "grid", "model": "model", "estimator": "estimator",
    "n": "n", "k": "K", "trials": "trials", "seed": "seed", "rho": "rho",
    "omega": "omega", "beta": "beta", "theta_lo": "theta_lo",
    "frac_pure": "frac_pure", "dirichlet_a": "dirichlet_a", "alpha": "alpha",
    "planted": "planted",
}


def _fit_points(records):
    """(x, trial-averaged mean_l1_error) pairs from a record table."""
    values = sorted({r.value for r in records})
    param = records[0].param
    pts = []
    for v in values:
        errs = [r.mean_l1_error for r in records if r.value == v and r.failure is None]
        x = v - 2.0 if param == "beta" else v
        pts.append((x, float(np.mean(errs)) if errs else float("nan")))
    return pts


def _xlabel(param):
    return "beta - 2" if param == "beta" else param


def cmd_sweep(args):
    raw = _merge(_load_config(args.config), args, SWEEP_FLAGS)
    for flag in ("record_eig", "record_dev", "record_connected"):
        if getattr(args, flag):
            raw[flag] = True
    _need_seed(raw)
    cfg = SweepConfig.from_dict(raw)
    result = run_sweep(cfg, threads=args.threads)
    io.write_records(args.out, result.records)
    fit = result.fit
    summary = {"config": cfg.to_dict(), "fit": fit._asdict(), "points": result.summary,
               "failures": len(result.failures)}
    with open(str(args.out) + ".fit.json", "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if args.plot:
        pts = [(row["x"], row["mean_l1_error"]) for row in result.summary]
        Path(args.plot).write_text(
            loglog_svg(pts, fit.slope, fit.intercept, _xlabel(cfg.param)))
    print(f"slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r_squared:.4f}")
    if result.failures:
        for r in result.failures:
            print(f"error: trial {r.trial} at {r.param}={r.value:g}: {r.failure}",
                  file=sys.stderr)
        return 1
    return 0


# -- threshold --------------------------------------------------------------

THRESHOLD_HEADER = ("c", "p", "trials", "connected", "frequency")


def cmd_threshold(args):
    raw = _merge(_load_config(args.config), args,
                 {"n": "n", "c_grid": "c_grid", "trials": "trials", "seed": "seed"})
    _need_seed(raw)
    res = threshold_scan(raw["n"], raw["c_grid"], int(raw["trials"]), int(raw["seed"]),
                         threads=args.threads)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(THRESHOLD_HEADER)
        for k, (c, p, f) in enumerate(zip(res.c_grid, res.p, res.frequencies)):
            w.writerow([io.fmt(c), io.fmt(p), len(res.connected),
                        int(res.connected[:, k].sum()), io.fmt(f)])
    for c, f in zip(res.c_grid, res.frequencies):
        print(f"c={c:g} connected={f:.3f}")
    return 0


def read_threshold(path):
    with open(path, newline="") as fh:
        return {float(r["c"]): float(r["frequency"]) for r in csv.DictReader(fh)}


# -- report -----------------------------------------------------------------

def _fit_csv(path):
    return fit_loglog_slope(_fit_points(io.read_records(path)))


def cmd_report(args):
    verdict = scstc_report(_fit_csv(args.sparsity), _fit_csv(args.separation),
                           read_threshold(args.threshold))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = verdict.pop("text")
    with open(out / "verdict.json", "w", newline="\n") as fh:
        json.dump(verdict, fh, indent=2)
        fh.write("\n")
    (out / "verdict.txt").write_text(text + "\n")
    print(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="specmix", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a ground-truth bundle")
    g.add_argument("--config")
    g.add_argument("--model", choices=["mmsb", "dcmm"])
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--rho", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--theta-lo", dest="theta_lo", type=float)
    g.add_argument("--frac-pure", dest="frac_pure", type=float)
    g.add_argument("--dirichlet-a", dest="dirichlet_a", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="estimate memberships from an edge list")
    e.add_argument("--edges")
    e.add_argument("--bundle")
    e.add_argument("--truth")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--algo", choices=["spacl", "svmcone"], default="spacl")
    e.add_argument("--seed", type=int)
    e.add_argument("--out", required=True)
    e.add_argument("--scores")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("sweep", help="run a Monte Carlo parameter sweep")
    s.add_argument("--config")
    s.add_argument("--param", choices=["rho", "omega", "beta", "n"])
    s.add_argument("--grid", type=_floats)
    s.add_argument("--model", choices=["mmsb", "dcmm"])
    s.add_argument("--estimator", choices=["spacl", "svmcone"])
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--rho", type=float)
    s.add_argument("--omega", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--theta-lo", dest="theta_lo", type=float)
    s.add_argument("--frac-pure", dest="frac_pure", type=float)
    s.add_argument("--dirichlet-a", dest="dirichlet_a", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--planted", type=_floats, help="c,exponent: plant error = c*x^exponent")
    s.add_argument("--record-eig", dest="record_eig", action="store_true")
    s.add_argument("--record-dev", dest="record_dev", action="store_true")
    s.add_argument("--record-connected", dest="record_connected", action="store_true")
    s.add_argument("--threads", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--plot")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("threshold", help="ER connectivity scan around log(n)/n")
    t.add_argument("--config")
    t.add_argument("--n", type=int)
    t.add_argument("--c-grid", dest="c_grid", type=_floats)
    t.add_argument("--trials", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--threads", type=int)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_threshold)

    r = sub.add_parser("report", help="SCSTC verdict from sweep and threshold CSVs")
    r.add_argument("--sparsity", required=True)
    r.add_argument("--separation", required=True)
    r.add_argument("--threshold", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (SpecmixError, OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
