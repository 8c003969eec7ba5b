"""Parameter sweeps: a cartesian matrix of runs with a pulse summary table.

The matrix file is YAML with three sections:

    base:  nested config keys shared by every run (same schema as a run config)
    cells: optional list of partial overrides applied one at a time
           (e.g. per-n horizons)
    vary:  nested mapping whose leaf LISTS are expanded cartesianly

Every (cell x vary-combination) is deep-merged over base, named
"<base name>-n<N>-R<R>-s<seed>", validated through the ordinary config
parser, and deduplicated by the config hash (which ignores run_name).
"""

from __future__ import annotations

import copy
import dataclasses
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import yaml

from .artifacts import RunArtifact, read_pulse_report, write_run_artifact
from .config import ConfigError, ExperimentConfig, parse_config
from .solver import simulate


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _leaf_lists(tree: dict, prefix=()) -> list[tuple[tuple, list]]:
    """Paths of every list leaf in the vary tree."""
    found = []
    for k, v in tree.items():
        if isinstance(v, dict):
            found.extend(_leaf_lists(v, prefix + (k,)))
        elif isinstance(v, list):
            found.append((prefix + (k,), v))
        else:
            raise ConfigError(
                f"vary entries must be lists, got {type(v).__name__} at "
                f"{'.'.join(prefix + (k,))}"
            )
    return found


def _set_path(tree: dict, path: tuple, value) -> None:
    node = tree
    for k in path[:-1]:
        node = node.setdefault(k, {})
    node[path[-1]] = value


def expand_matrix(text: str) -> list[ExperimentConfig]:
    """Expand a matrix file into validated, deduplicated configs."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"matrix is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("matrix file must be a mapping")
    unknown = set(doc) - {"base", "cells", "vary"}
    if unknown:
        raise ConfigError(f"unknown matrix keys {sorted(unknown)}")
    base = doc.get("base") or {}
    cells = doc.get("cells") or [{}]
    vary = doc.get("vary") or {}
    if not isinstance(cells, list):
        raise ConfigError("cells must be a list of mappings")

    paths_values = _leaf_lists(vary)
    base_name = base.get("run_name", "sweep")

    configs: list[ExperimentConfig] = []
    seen: set[str] = set()
    for cell in cells:
        if not isinstance(cell, dict):
            raise ConfigError("each cell must be a mapping")
        for combo in itertools.product(*(v for _, v in paths_values)) \
                if paths_values else [()]:
            merged = _deep_merge(base, cell)
            for (path, _), value in zip(paths_values, combo):
                _set_path(merged, path, value)
            cfg = parse_config(yaml.safe_dump(merged))
            if "run_name" not in cell:
                # base run_name only prefixes the generated per-cell names
                rey = cfg.reynolds
                rtag = "inf" if math.isinf(rey) else f"{rey:g}"
                cfg = dataclasses.replace(
                    cfg, run_name=f"{base_name}-n{cfg.n}-R{rtag}-s{cfg.seed}"
                )
            h = cfg.config_hash()
            if h in seen:
                continue
            seen.add(h)
            configs.append(cfg)
    return configs


SUMMARY_HEADER = (
    "run_name,config_hash,n,c,reynolds,seed,status,"
    "sigma_drift,t_min,m,t_max,M,pulse_end,sigma_linear"
)


@dataclass
class SweepSummaryRow:
    run_name: str
    config_hash: str
    n: int
    c: float
    reynolds: float
    seed: int
    status: str
    sigma_drift: float | None
    t_min: float | None
    m: float | None
    t_max: float | None
    M: float | None
    pulse_end: float | None
    sigma_linear: float | None

    def csv(self) -> str:
        def f(v):
            if v is None:
                return ""
            return format(v, ".17g") if isinstance(v, float) else str(v)

        return ",".join(
            f(v)
            for v in (
                self.run_name, self.config_hash, self.n, self.c, self.reynolds,
                self.seed, self.status, self.sigma_drift, self.t_min, self.m,
                self.t_max, self.M, self.pulse_end, self.sigma_linear,
            )
        )


def summarize_artifact(art: RunArtifact) -> SweepSummaryRow:
    cfg = art.config
    drift = read_pulse_report(art.path, "dev_drift")
    linear = read_pulse_report(art.path, "dev_linear")
    return SweepSummaryRow(
        run_name=cfg.run_name,
        config_hash=cfg.config_hash(),
        n=cfg.n,
        c=cfg.c,
        reynolds=cfg.reynolds,
        seed=cfg.seed,
        status=art.status,
        sigma_drift=drift.sigma if drift else None,
        t_min=drift.t_min if drift else None,
        m=drift.m if drift else None,
        t_max=drift.t_max if drift else None,
        M=drift.M if drift else None,
        pulse_end=drift.t_end if drift else None,
        sigma_linear=linear.sigma if linear else None,
    )


def _run_one(cfg_yaml: str, out_root: str) -> str:
    # worker entry point; args/results stay picklable
    cfg = parse_config(cfg_yaml)
    result = simulate(cfg)
    art = write_run_artifact(Path(out_root) / cfg.run_name, result, cfg.validate())
    return str(art.path)


def run_sweep(configs, out_root, workers: int = 1,
              progress=None) -> tuple[list[RunArtifact], Path]:
    """Execute all runs and aggregate the pulse summary CSV.

    Runs are isolated; with workers > 1 they execute in separate processes.
    Summary rows are written by this process only, in config order, so the
    table is deterministic either way.  A failed run is recorded in the
    summary and does not abort the sweep.
    """
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    artifacts: list[RunArtifact] = []
    if workers <= 1:
        for i, cfg in enumerate(configs):
            if progress:
                progress(f"[{i + 1}/{len(configs)}] {cfg.run_name}")
            result = simulate(cfg)
            artifacts.append(
                write_run_artifact(out_root / cfg.run_name, result, cfg.validate())
            )
    else:
        # run_name is not hashed, so re-attach it for the worker
        texts = [
            yaml.safe_dump({**cfg.to_dict(), "run_name": cfg.run_name})
            for cfg in configs
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, path in enumerate(pool.map(_run_one, texts,
                                              [str(out_root)] * len(configs))):
                if progress:
                    progress(f"[{i + 1}/{len(configs)}] {Path(path).name}")
                artifacts.append(RunArtifact.load(path))
    rows = [summarize_artifact(art).csv() for art in artifacts]
    summary = out_root / "summary.csv"
    summary.write_text("\n".join([SUMMARY_HEADER] + rows) + "\n")
    return artifacts, summary
