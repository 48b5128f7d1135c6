"""Command-line interface.

One executable, one subcommand per experiment. Exit codes: 0 on success,
1 on usage or configuration errors, 2 when an asserted bound is violated.
Reports are JSON with sorted keys; the only non-reproducible field is the
top-level "timestamp" key. ``GAFZEROS_SEED`` provides the default seed.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bumps import build_bump
from .deviations import (AbsSublevelEvent, AbsSuperlevelEvent, BoxEvent,
                         RealPolynomial, SectorEvent, SublevelEvent,
                         SuperlevelEvent, full_space_event, hole_probability,
                         lemma_check, offord_tail, polynomial_lemma_check)
from .domains import Disk, Rectangle
from .ensembles import Ensemble, ExplicitFamily
from .errors import ConfigError
from .intensity import density_grid, mu_region
from .rigidity import KernelModel, recover_equivalence, riesz_compare
from .sampling import draw, trial_generator
from .zeros import ZeroSet, companion_roots, locate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

_DEFAULT_SEED = 12345


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    env = os.environ.get("GAFZEROS_SEED")
    return int(env) if env else _DEFAULT_SEED


def _load_ensemble(path: str) -> Ensemble:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"ensemble file {path!r}: {exc}") from exc
    try:
        return Ensemble.from_config(cfg)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"ensemble file {path!r}: {exc}") from exc


def _parse_region(spec: str):
    kind, _, rest = spec.partition(":")
    try:
        parts = [float(p) for p in rest.split(",")]
        if kind == "disk":
            cx, cy, r = parts
            return Disk(complex(cx, cy), r)
        if kind == "rect":
            x0, y0, x1, y1 = parts
            return Rectangle(complex(x0, y0), complex(x1, y1))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad region spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown region kind in {spec!r} (use disk: or rect:)")


def _parse_event(spec: str):
    kind, _, rest = spec.partition(":")
    try:
        if kind == "sublevel":
            return SublevelEvent(float(rest))
        if kind == "superlevel":
            return SuperlevelEvent(float(rest))
        if kind == "sector":
            a, b = (float(p) for p in rest.split(","))
            return SectorEvent(a, b)
        if kind == "all":
            return full_space_event()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad event spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown event kind in {spec!r}")


def _parse_poly_event(spec: str):
    kind, _, rest = spec.partition(":")
    try:
        if kind == "abs-sublevel":
            return AbsSublevelEvent(float(rest))
        if kind == "abs-superlevel":
            return AbsSuperlevelEvent(float(rest))
        if kind == "box":
            vals = [float(p) for p in rest.split(",")]
            if len(vals) % 2:
                raise ValueError("box needs an even number of bounds")
            return BoxEvent(tuple((vals[i], vals[i + 1]) for i in range(0, len(vals), 2)))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad event spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown polynomial event kind in {spec!r}")


def _floats(csv_text: str) -> list:
    return [float(p) for p in csv_text.split(",") if p]


def _write_report(path: str, config: dict, results) -> dict:
    report = {
        "config": config,
        "results": results,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "version": __version__,
    }
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def _write_series(path: str, header: tuple, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ------------------------------------------------------------ subcommands

def _cmd_sample(args) -> int:
    ensemble = _load_ensemble(args.ensemble)
    trials = []
    for k in range(args.trials):
        s = draw(ensemble, master_seed=args.seed, trial_index=k)
        trials.append({"trial": k,
                       "coefficients": [[c.real, c.imag] for c in s.coefficients]})
    config = {"ensemble": ensemble.to_config(), "seed": args.seed,
              "trials": args.trials, "experiment": "sample"}
    _write_report(args.out, config, {"samples": trials,
                                     "n_coefficients": ensemble.n_coefficients})
    return EXIT_OK


def _cmd_zeros(args) -> int:
    ensemble = _load_ensemble(args.ensemble)
    region = _parse_region(args.region)
    sample = draw(ensemble, master_seed=args.seed, trial_index=args.trial)
    if args.method == "companion":
        zs = companion_roots(sample, region)
    else:
        zs = locate(sample, region)
    _write_series(args.out, ("re", "im", "multiplicity"),
                  [(z.real, z.imag, m) for z, m in zs.zeros])
    print(zs.count)
    return EXIT_OK


def _cmd_intensity(args) -> int:
    ensemble = _load_ensemble(args.ensemble)
    region = _parse_region(args.region)
    if args.expected_count:
        print(mu_region(ensemble.family, region))
        return EXIT_OK
    try:
        w, h = (int(p) for p in args.grid.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {args.grid!r} (use WxH)") from exc
    xs, ys, vals = density_grid(ensemble.family, region, w, h, form=args.form)
    rows = [(x, y, vals[iy, ix])
            for iy, y in enumerate(ys) for ix, x in enumerate(xs)
            if np.isfinite(vals[iy, ix])]
    _write_series(args.out, ("x", "y", "density"), rows)
    if args.emit_plot_data:
        radial = [(x, vals[len(ys) // 2, ix]) for ix, x in enumerate(xs)
                  if x >= 0 and np.isfinite(vals[len(ys) // 2, ix])]
        _write_series(_plot_path(args.out), ("r", "density"), radial)
    return EXIT_OK


def _plot_path(out: str) -> str:
    p = Path(out)
    return str(p.with_suffix(".plot.csv"))


def _cmd_tail(args) -> int:
    ensemble = _load_ensemble(args.ensemble)
    try:
        r, big_r = _floats(args.bump)
    except ValueError as exc:
        raise ConfigError(f"bad bump spec {args.bump!r} (use r,R)") from exc
    cx, cy = _floats(args.center) if args.center else (0.0, 0.0)
    bump = build_bump(r, big_r, complex(cx, cy))
    lambdas = _floats(args.lambdas)
    if not lambdas:
        raise ConfigError("at least one lambda is required")
    report = offord_tail(ensemble, bump, lambdas, args.trials, args.seed,
                         workers=args.workers, method=args.method)
    config = {"ensemble": ensemble.to_config(), "seed": args.seed,
              "trials": args.trials, "bump": [r, big_r], "center": [cx, cy],
              "lambdas": lambdas, "workers_note": "results independent of workers",
              "experiment": "tail"}
    _write_report(args.out, config, report)
    if args.emit_plot_data:
        _write_series(_plot_path(args.out), ("lambda", "empirical", "bound"),
                      [(e["lambda"], e["empirical_prob"], e["bound"])
                       for e in report["estimates"]])
    return EXIT_OK if report["all_consistent"] else EXIT_VIOLATION


def _cmd_hole(args) -> int:
    ensemble = _load_ensemble(args.ensemble)
    radii = _floats(args.R)
    if not radii:
        raise ConfigError("at least one radius is required")
    report = hole_probability(ensemble, radii, args.trials, args.seed,
                              workers=args.workers)
    config = {"ensemble": ensemble.to_config(), "seed": args.seed,
              "trials": args.trials, "radii": radii, "experiment": "hole"}
    _write_report(args.out, config, report)
    if args.emit_plot_data:
        _write_series(_plot_path(args.out), ("R", "empirical", "bound"),
                      [(r["R"], r["empirical"], r["bound"]) for r in report["radii"]])
    return EXIT_OK if report["all_consistent"] else EXIT_VIOLATION


def _cmd_lemma(args) -> int:
    events = [_parse_event(spec) for spec in args.events]
    sigmas = _floats(args.sigma)
    reports = [lemma_check(s, e) for s in sigmas for e in events]
    config = {"sigmas": sigmas, "events": args.events, "experiment": "lemma"}
    _write_report(args.out, config, {"checks": reports,
                                     "all_hold": all(r["holds"] for r in reports)})
    return EXIT_OK if all(r["holds"] for r in reports) else EXIT_VIOLATION


def _load_model(path: str) -> KernelModel:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"model file {path!r}: {exc}") from exc
    try:
        coeffs = np.array([[complex(re, im) for re, im in row]
                           for row in cfg["coeffs"]])
        family = ExplicitFamily(coeffs)
        unitary = None
        if "unitary" in cfg:
            unitary = np.array([[complex(re, im) for re, im in row]
                                for row in cfg["unitary"]])
        log_factor = None
        if "log_factor" in cfg:
            log_factor = np.array([complex(re, im) for re, im in cfg["log_factor"]])
        return KernelModel(family, unitary, log_factor)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"model file {path!r}: {exc}") from exc


def _cmd_rigidity(args) -> int:
    model1 = _load_model(args.model1)
    model2 = _load_model(args.model2)
    if args.points == "auto":
        gen = trial_generator(args.seed, 0)
        n = max(model1.dim, model2.dim)
        pts = 0.9 * np.sqrt(gen.random(3 * n)) * np.exp(2j * np.pi * gen.random(3 * n))
    else:
        try:
            raw = json.loads(Path(args.points).read_text())
            pts = np.array([complex(re, im) for re, im in raw])
        except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
            raise ConfigError(f"points file {args.points!r}: {exc}") from exc
    grid = [complex(x, y) for x in np.linspace(-0.6, 0.6, 7)
            for y in np.linspace(-0.6, 0.6, 7)]
    comparison = riesz_compare(model1, model2, grid)
    config = {"model1": args.model1, "model2": args.model2,
              "seed": args.seed, "experiment": "rigidity"}
    if not comparison["same_riesz_measure"]:
        _write_report(args.out, config,
                      {"riesz_compare": comparison, "certificate": None,
                       "equivalent": False})
        return EXIT_VIOLATION
    cert = recover_equivalence(model1, model2, pts)
    _write_report(args.out, config,
                  {"riesz_compare": comparison, "certificate": cert.to_dict(),
                   "equivalent": cert.valid})
    return EXIT_OK if cert.valid else EXIT_VIOLATION


def _cmd_poly_lemma(args) -> int:
    try:
        spec = json.loads(Path(args.poly).read_text()) if Path(args.poly).exists() \
            else json.loads(args.poly)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"polynomial spec {args.poly!r}: {exc}") from exc
    try:
        poly = RealPolynomial(np.array(spec["coeffs"], dtype=float))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"polynomial spec {args.poly!r}: {exc}") from exc
    event = _parse_poly_event(args.event)
    try:
        report = polynomial_lemma_check(poly, event, trials=args.trials,
                                        master_seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = {"poly": spec, "event": args.event, "trials": args.trials,
              "seed": args.seed, "experiment": "poly-lemma"}
    _write_report(args.out, config, report)
    return EXIT_OK if report["finite"] else EXIT_VIOLATION


# ----------------------------------------------------------------- parser

def _build_parser() -> _Parser:
    parser = _Parser(prog="gafzeros",
                     description="Zero statistics of random analytic functions")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default=1000):
        p.add_argument("--seed", type=int, default=_default_seed(),
                       help="master seed (default: GAFZEROS_SEED or 12345)")
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--out", required=True, help="output path")

    p = sub.add_parser("sample", help="draw coefficient vectors")
    p.add_argument("--ensemble", required=True)
    common(p, trials_default=10)
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("zeros", help="locate zeros of one trial")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--region", required=True, help="disk:cx,cy,r or rect:x0,y0,x1,y1")
    p.add_argument("--method", choices=["locate", "companion"], default="locate")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_zeros)

    p = sub.add_parser("intensity", help="expected zero density and counts")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--grid", default="40x40")
    p.add_argument("--form", choices=["auto", "closed", "numeric"], default="auto")
    p.add_argument("--expected-count", action="store_true",
                   help="print the expected zero count of the region and exit")
    p.add_argument("--emit-plot-data", action="store_true")
    p.add_argument("--out", default="density.csv")
    p.set_defaults(fn=_cmd_intensity)

    p = sub.add_parser("tail", help="large-deviation tail of a linear statistic")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--bump", required=True, help="inner,outer radii")
    p.add_argument("--center", default=None, help="bump center cx,cy (default origin)")
    p.add_argument("--lambdas", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--method", choices=["companion", "locate"], default="companion")
    p.add_argument("--emit-plot-data", action="store_true")
    common(p, trials_default=4000)
    p.set_defaults(fn=_cmd_tail)

    p = sub.add_parser("hole", help="empirical hole probability against the bound")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--R", required=True, help="comma-separated disk radii")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--emit-plot-data", action="store_true")
    common(p, trials_default=10000)
    p.set_defaults(fn=_cmd_hole)

    p = sub.add_parser("lemma", help="log-moment inequality checks")
    p.add_argument("--sigma", default="1.0", help="comma-separated sigmas")
    p.add_argument("--events", nargs="+", required=True,
                   help="sublevel:s superlevel:s sector:a,b all")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_lemma)

    p = sub.add_parser("rigidity", help="recover the scalar/unitary equivalence")
    p.add_argument("--model1", required=True)
    p.add_argument("--model2", required=True)
    p.add_argument("--points", default="auto")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_rigidity)

    p = sub.add_parser("poly-lemma", help="polynomial log-moment Monte Carlo check")
    p.add_argument("--poly", required=True, help="JSON spec or file path")
    p.add_argument("--event", required=True,
                   help="abs-sublevel:s abs-superlevel:s box:lo,hi[,lo,hi]")
    common(p, trials_default=100000)
    p.set_defaults(fn=_cmd_poly_lemma)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"gafzeros: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
