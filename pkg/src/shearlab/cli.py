"""Command-line entry points.

Subcommands: simulate, spectrum, sweep, validate, report.
Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
The default output root is $SHEARLAB_OUT_ROOT, falling back to ./runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import acceptance as accept
from .artifacts import write_run_artifact, write_spectrum_csv
from .config import ConfigError, load_config
from .report import render_report
from .shear import ShearProfile
from .spectra import (
    ProfileSample,
    SpectrumError,
    admissible_alphas,
    orr_sommerfeld_spectrum,
    rayleigh_spectrum,
)
from .sweep import expand_matrix, run_sweep

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _out_root(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    return Path(os.environ.get("SHEARLAB_OUT_ROOT", "runs"))


def cmd_simulate(args) -> int:
    try:
        cfg, warnings = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed_override)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    from .solver import simulate

    result = simulate(cfg)
    out = _out_root(args) / cfg.run_name
    art = write_run_artifact(out, result, warnings)
    print(f"run {cfg.run_name}: {result.status} "
          f"({result.n_steps} steps, {result.wall_time_s:.1f}s) -> {art.path}")
    if result.status != "completed":
        print(f"failure: {result.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _parse_spectrum_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("spectrum config must be a mapping")
    known = {"profile", "alphas", "jmax", "Lx", "reynolds", "Ny",
             "filter_tol", "name"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown spectrum keys {sorted(unknown)}")
    prof = doc.get("profile") or {}
    kind = prof.get("kind", "oscillatory")
    extra = set(prof) - {"kind", "c", "n"}
    if extra:
        raise ConfigError(f"unknown profile keys {sorted(extra)}")
    Ny = int(doc.get("Ny", 129))
    if kind == "couette":
        sample = ProfileSample.couette(Ny)
        label = "couette"
    elif kind == "oscillatory":
        p = ShearProfile(float(prof.get("c", 0.07)), int(prof.get("n", 1)))
        sample = ProfileSample.from_shear(p, Ny)
        label = f"oscillatory-c{p.c:g}-n{p.n}"
    else:
        raise ConfigError(f"unknown profile kind {kind!r}")
    if "alphas" in doc:
        raw = doc["alphas"] or []
        if not isinstance(raw, list):
            raise ConfigError("alphas must be a list")
        alphas = [float(a) for a in raw]
    else:
        alphas = list(admissible_alphas(float(doc.get("Lx", 2.0)),
                                        int(doc.get("jmax", 8))))
    if not alphas:
        raise ConfigError("alpha list is empty")
    reynolds = doc.get("reynolds")
    if reynolds is not None and not isinstance(reynolds, list):
        reynolds = [reynolds]
    return {
        "sample": sample,
        "label": label,
        "alphas": alphas,
        "reynolds": reynolds,
        "Ny": Ny,
        "filter_tol": doc.get("filter_tol"),
        "name": doc.get("name", "spectra"),
        "raw": doc,
    }


def cmd_spectrum(args) -> int:
    try:
        spec = _parse_spectrum_config(args.config)
    except (OSError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = _out_root(args) / spec["name"]
    (out / "spectra").mkdir(parents=True, exist_ok=True)
    results, errors = [], []
    r_list = spec["reynolds"] or [None]
    for R in r_list:
        for alpha in spec["alphas"]:
            try:
                kwargs = {}
                if spec["filter_tol"] is not None:
                    kwargs["filter_tol"] = float(spec["filter_tol"])
                if R is None:
                    res = rayleigh_spectrum(spec["sample"], alpha,
                                            Ny=spec["Ny"], **kwargs)
                else:
                    res = orr_sommerfeld_spectrum(spec["sample"], alpha,
                                                  float(R), Ny=spec["Ny"],
                                                  **kwargs)
                results.append(res)
                print(f"  {spec['label']} alpha={alpha:g} "
                      f"R={'inviscid' if R is None else R}: "
                      f"max growth {res.max_growth():+.6f} "
                      f"({res.n_retained} retained)")
            except (SpectrumError, ValueError) as exc:
                errors.append(f"alpha={alpha:g}, R={R}: {exc}")
                print(f"  alpha={alpha:g}, R={R}: failed ({exc})",
                      file=sys.stderr)
    csv_path = out / "spectra" / "spectrum.csv"
    write_spectrum_csv(csv_path, results, spec["label"])
    (out / "config.yaml").write_text(yaml.safe_dump(spec["raw"], sort_keys=True))
    (out / "status.json").write_text(json.dumps(
        {"status": "completed" if results else "failed", "errors": errors},
        indent=1,
    ))
    print(f"spectrum table -> {csv_path}")
    return EXIT_OK if results else EXIT_RUNTIME


def cmd_sweep(args) -> int:
    try:
        text = Path(args.config).read_text()
        configs = expand_matrix(text)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed_override is not None:
        # shift every seed to rerun the matrix as a fresh ensemble
        configs = [
            dataclasses.replace(c, seed=c.seed + args.seed_override)
            for c in configs
        ]
    print(f"sweep: {len(configs)} unique runs")
    artifacts, summary = run_sweep(configs, _out_root(args),
                                   workers=args.workers, progress=print)
    failed = [a for a in artifacts if a.status != "completed"]
    print(f"summary -> {summary}")
    if failed:
        print(f"{len(failed)} run(s) failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_validate(args) -> int:
    names = args.suite or None
    try:
        results = accept.run_acceptance(names)
    except KeyError as exc:
        print(f"usage error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    out = _out_root(args)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        r.name: {"passed": bool(r.passed), "runtime_s": r.runtime_s,
                 "details": _jsonable(r.details)}
        for r in results
    }
    path = out / "validate_report.json"
    path.write_text(json.dumps(report, indent=1))
    n_fail = sum(not r.passed for r in results)
    print(f"report -> {path}")
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return EXIT_OK if n_fail == 0 else EXIT_RUNTIME


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def cmd_report(args) -> int:
    try:
        written = render_report(args.artifact, args.out_dir)
    except (OSError, ValueError) as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for p in written:
        print(f"figure -> {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shearlab",
        description="2D channel-flow laboratory: oscillatory shears, "
                    "transient growth, and stability spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configured run")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--seed-override", type=int, default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("spectrum", help="Rayleigh / Orr-Sommerfeld scans")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("sweep", help="run a parameter matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed-override", type=int, default=None,
                   help="offset added to every seed in the matrix")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("validate", help="run acceptance suites")
    p.add_argument("--suite", action="append",
                   help=f"one of: {', '.join(accept.available_suites())} "
                        "(repeatable; default all numbered criteria)")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("report", help="render quick-look figures for a run")
    p.add_argument("--artifact", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
