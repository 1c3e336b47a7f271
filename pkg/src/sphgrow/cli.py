"""Command-line laboratory for the growth experiments.

Usage:
    sphgrow [--config FILE] [--seed N] [--out DIR] [--threads N] SUBCOMMAND

Subcommands: thm7, thm56, thm1scan, thm3, thm4scan, classical, render,
specfun-check.  Each writes report.json and rows.csv to --out (plus a
.ppm for render).  Reports are byte-identical across runs with the same
config and seed.

Config JSON schema (every key optional; defaults shown by `--help`):
{
  "function": {"variant": "exp_affine", "lambda": [1.0, 0.0]},
  "thm7":     {"region": REGION, "R": 5.0, "m": 2, "n_min": 1, "n_max": 4,
               "grid": GRID, "auto_center": false},
  "thm56":    {"region": REGION, "R_lower": 5.0, "R_upper": 5.0, "m": 2,
               "n_min": 1, "n_max": 3, "grid": GRID},
  "thm1scan": {"region": REGION, "N": 5, "starts": 20, "grid": GRID},
  "thm3":     {"lambda": 1.0, "x0": 26.0, "n_max": 7, "precision_bits": 256,
               "x0_tier_a": 1e6, "n_tier_a": 10000},
  "thm4scan": {"alpha": 1.0, "eta": 0.1, "N": 25, "starts": 1000},
  "classical": {"samples": 10000},
  "render":   {"window": REGION, "resolution": 512, "R": 5.0,
               "l_max": 3, "n_max": 12}
}
REGION: {"kind": "disk", "center": [re, im], "radius": r}
     or {"kind": "rectangle", "center": [re, im],
         "half_width": w, "half_height": h}
GRID:   {"base_resolution": 32, "max_refinements": 8, "rel_tol": 1e-3}
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dynamics as dy
from . import experiments as ex
from . import functions as fx
from . import measures as ms
from . import render as rd

DEFAULT_FUNCTION = {"variant": "exp_affine", "lambda": [1.0, 0.0]}


def _region_from_json(obj) -> ms.Region:
    center = complex(obj["center"][0], obj["center"][1])
    if obj["kind"] == "disk":
        return ms.Region.disk(center, obj["radius"])
    return ms.Region.rectangle(center, obj["half_width"], obj["half_height"])


def _grid_from_json(obj) -> ms.GridSpec:
    obj = obj or {}
    return ms.GridSpec(base_resolution=obj.get("base_resolution", 32),
                       max_refinements=obj.get("max_refinements", 8),
                       rel_tol=obj.get("rel_tol", 1e-3))


def _auto_region(f, seed_point=complex(1.0, 1.0), radius=0.5) -> ms.Region:
    """Center the region on a repelling fixed point of f."""
    pt = dy.find_periodic_point(f, 1, seed_point)
    return ms.Region.disk(pt.location, radius)


def _load_section(config: dict, name: str) -> dict:
    return dict(config.get(name, {}))


def _resolve_region(section: dict, f, default_auto=True) -> ms.Region:
    if "region" in section:
        return _region_from_json(section["region"])
    if default_auto:
        return _auto_region(f)
    raise ValueError("region required")


def _write_outputs(report, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "wb") as fh:
        fh.write(report.to_json().encode("utf-8"))
    with open(os.path.join(out_dir, "rows.csv"), "wb") as fh:
        fh.write(report.rows_csv().encode("utf-8"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sphgrow",
        description="Numerical laboratory for spherical-derivative growth "
                    "of entire functions under iteration.")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for all sampling (u64)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=0,
                        help="kernel threads (0 = library default)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("thm7", "thm56", "thm1scan", "thm3", "thm4scan",
                 "classical", "render", "specfun-check"):
        sub.add_parser(name)
    args = parser.parse_args(argv)

    if args.threads > 0:
        try:
            import numba
            numba.set_num_threads(args.threads)
        except (ImportError, ValueError):
            pass

    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    f = fx.descriptor_from_json(config.get("function", DEFAULT_FUNCTION))
    seed = args.seed

    if args.command == "thm7":
        c = _load_section(config, "thm7")
        report = ex.run_thm7(
            f, _resolve_region(c, f), c.get("R", 5.0), c.get("m", 2),
            range(c.get("n_min", 1), c.get("n_max", 4) + 1),
            _grid_from_json(c.get("grid")))
    elif args.command == "thm56":
        c = _load_section(config, "thm56")
        report = ex.run_thm5_thm6(
            f, _resolve_region(c, f), c.get("R_lower", 5.0),
            c.get("R_upper", 5.0), c.get("m", 2),
            range(c.get("n_min", 1), c.get("n_max", 3) + 1),
            _grid_from_json(c.get("grid")))
    elif args.command == "thm1scan":
        c = _load_section(config, "thm1scan")
        report = ex.run_thm1_growth_scan(
            f, _resolve_region(c, f), c.get("N", 5), c.get("starts", 20),
            seed=seed, grid=_grid_from_json(c.get("grid")))
    elif args.command == "thm3":
        c = _load_section(config, "thm3")
        report = ex.run_thm3(
            complex(c.get("lambda", 1.0)), c.get("x0", 26.0),
            c.get("n_max", 7), c.get("precision_bits", 256),
            x0_tier_a=c.get("x0_tier_a", 1e6),
            n_tier_a=c.get("n_tier_a", 10_000))
    elif args.command == "thm4scan":
        c = _load_section(config, "thm4scan")
        ml = fx.ScaledMittagLeffler(c.get("alpha", 1.0), c.get("eta", 0.1))
        report = ex.run_thm4_scan(ml, c.get("N", 25), c.get("starts", 1000),
                                  seed=seed)
    elif args.command == "classical":
        c = _load_section(config, "classical")
        report = ex.classical_suite(seed=seed, samples=c.get("samples", 10_000))
    elif args.command == "specfun-check":
        report = ex.run_specfun_check(seed=seed)
    elif args.command == "render":
        c = _load_section(config, "render")
        window = _region_from_json(c["window"]) if "window" in c else \
            ms.Region.rectangle(complex(1.0, 0.0), 3.0, 3.0)
        os.makedirs(args.out, exist_ok=True)
        ppm = os.path.join(args.out, "escape.ppm")
        stats = rd.render_escape(
            f, window, c.get("resolution", 512), c.get("R", 5.0),
            c.get("l_max", 3), c.get("n_max", 12), ppm)
        report = ex.ExperimentReport(
            experiment_id="render-escape", function=fx.descriptor_to_json(f),
            parameters={k: v for k, v in stats.items() if k != "path"},
            rows=[], verdict=ex.PASS, tolerances={})
    else:  # pragma: no cover - argparse guards this
        raise ValueError(args.command)

    _write_outputs(report, args.out)
    print(f"{report.experiment_id}: {report.verdict} "
          f"(report.json, rows.csv in {args.out})")
    return 0 if report.verdict != ex.FAIL else 1


if __name__ == "__main__":
    sys.exit(main())
