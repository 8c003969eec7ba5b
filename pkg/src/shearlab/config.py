"""Experiment configuration: strict YAML schema, validation, canonical form.

A config file is a nested mapping; unknown keys anywhere are errors (with the
line number), so typos in reproduction configs fail loudly.  Viscosity may be
given as either `reynolds` or `epsilon` (exactly one); the stored canonical
form is epsilon = 1/R.  An amplitude parameter outside the inviscid
instability window is recorded as a warning, not an error.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field, fields

import yaml

from .shear import in_instability_window


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class ExperimentConfig:
    """Full specification of one simulation run."""

    run_name: str = "run"
    n: int = 1
    c: float = 0.07
    epsilon: float = 1e-4
    Lx: float = 2.0
    Nx: int = 128
    Ny: int = 129
    horizon: float = 60.0
    output_interval: float = 0.1
    dt_mode: str = "cfl"           # cfl | fixed
    dt_value: float | None = None  # required for fixed mode; cap for cfl
    cfl_safety: float = 0.5
    dt_max: float = 0.05
    snapshot_times: tuple = ()
    amplitude: float = 0.01
    seed: int = 0
    jmax: int = 8
    kmax: int = 8
    decay: float = 2.0
    dealias: bool = True
    bc_mode: str = "auto"

    @property
    def reynolds(self) -> float:
        return float("inf") if self.epsilon == 0.0 else 1.0 / self.epsilon

    def validate(self) -> list[str]:
        """Raise ConfigError on hard violations; return soft warnings."""
        if not self.run_name or "/" in self.run_name:
            raise ConfigError(f"invalid run_name {self.run_name!r}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ConfigError(f"profile n must be a positive integer, got {self.n}")
        if not self.c > 0:
            raise ConfigError(f"profile c must be positive, got {self.c}")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be nonnegative")
        if not self.Lx > 0:
            raise ConfigError("Lx must be positive")
        if self.Nx < 8 or self.Nx % 2:
            raise ConfigError("Nx must be even and >= 8")
        if self.Ny < 9:
            raise ConfigError("Ny must be >= 9")
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")
        if not 0 < self.output_interval <= self.horizon:
            raise ConfigError("output_interval must lie in (0, horizon]")
        if self.dt_mode not in ("cfl", "fixed"):
            raise ConfigError(f"dt mode must be cfl or fixed, got {self.dt_mode!r}")
        if self.dt_mode == "fixed" and not (self.dt_value and self.dt_value > 0):
            raise ConfigError("fixed dt mode requires a positive dt value")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError("cfl safety must be in (0, 1]")
        if not self.dt_max > 0:
            raise ConfigError("dt max must be positive")
        if self.amplitude < 0:
            raise ConfigError("perturbation amplitude must be nonnegative")
        if self.amplitude > 0:
            if self.jmax < 1 or self.kmax < 1:
                raise ConfigError("perturbation band must be nonempty")
            if self.jmax > self.Nx // 3:
                raise ConfigError(
                    f"perturbation jmax={self.jmax} exceeds dealiased x band "
                    f"{self.Nx // 3}"
                )
            if self.kmax > self.Ny // 3:
                raise ConfigError(
                    f"perturbation kmax={self.kmax} exceeds y resolution "
                    f"{self.Ny // 3}"
                )
        if self.bc_mode not in ("auto", "viscous", "inviscid"):
            raise ConfigError(f"unknown bc_mode {self.bc_mode!r}")
        if self.bc_mode == "viscous" and self.epsilon == 0.0:
            raise ConfigError("bc_mode viscous requires epsilon > 0")
        if self.bc_mode == "inviscid" and self.epsilon > 0.0:
            raise ConfigError("bc_mode inviscid requires epsilon = 0")
        for ts in self.snapshot_times:
            if not 0 <= ts <= self.horizon:
                raise ConfigError(f"snapshot time {ts} outside [0, horizon]")
        warnings = []
        if not in_instability_window(self.c):
            warnings.append(
                f"c={self.c} lies outside the instability window "
                f"(1/(8 pi), 1/(4 pi)) ~ (0.0398, 0.0796)"
            )
        return warnings

    # -- canonical serialization ---------------------------------------------

    def to_dict(self) -> dict:
        return {
            "run_name": self.run_name,
            "profile": {"n": self.n, "c": self.c},
            "epsilon": self.epsilon,
            "box": {"Lx": self.Lx, "Nx": self.Nx, "Ny": self.Ny},
            "time": {
                "horizon": self.horizon,
                "output_interval": self.output_interval,
                "dt": {
                    "mode": self.dt_mode,
                    "value": self.dt_value,
                    "safety": self.cfl_safety,
                    "max": self.dt_max,
                },
            },
            "snapshots": list(self.snapshot_times),
            "perturbation": {
                "amplitude": self.amplitude,
                "seed": self.seed,
                "jmax": self.jmax,
                "kmax": self.kmax,
                "decay": self.decay,
            },
            "dealias": self.dealias,
            "bc_mode": self.bc_mode,
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def config_hash(self) -> str:
        """Hash of the physical configuration; the run label is excluded so
        duplicate sweep cells deduplicate regardless of naming."""
        d = self.to_dict()
        d.pop("run_name")
        return hashlib.sha256(
            yaml.safe_dump(d, sort_keys=True).encode()
        ).hexdigest()[:16]


def _line(node) -> int:
    return node.start_mark.line + 1


def _as_tree(node):
    """yaml node -> (python value, line) tree preserving source positions."""
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = k.value
            if key in out:
                raise ConfigError(f"duplicate key {key!r}", _line(k))
            out[key] = (_as_tree(v), _line(k))
        return out
    if isinstance(node, yaml.SequenceNode):
        return [(_as_tree(v), _line(v)) for v in node.value]
    return yaml.safe_load(io.StringIO(yaml.serialize(node)))


def _take(mapping: dict, key: str, default=..., line: int | None = None):
    if key in mapping:
        value, _ = mapping.pop(key)
        return value
    if default is ...:
        raise ConfigError(f"missing required key {key!r}", line)
    return default


def _reject_unknown(mapping: dict, context: str):
    if mapping:
        key, (_, line) = next(iter(mapping.items()))
        raise ConfigError(f"unknown key {context}{key!r}", line)


def _submap(mapping: dict, key: str) -> dict:
    if key not in mapping:
        return {}
    value, line = mapping.pop(key)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key!r} must be a mapping", line)
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse a YAML config string; unknown keys are errors with line numbers."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(
            f"config is not valid YAML: {exc}",
            mark.line + 1 if mark else None,
        ) from exc
    if node is None:
        raise ConfigError("config is empty")
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("config must be a mapping", _line(node))
    tree = _as_tree(node)

    profile = _submap(tree, "profile")
    box = _submap(tree, "box")
    tmap = _submap(tree, "time")
    dtmap = _submap(tmap, "dt")
    pert = _submap(tree, "perturbation")

    has_eps = "epsilon" in tree
    has_rey = "reynolds" in tree
    if has_eps and has_rey:
        _, line = tree["reynolds"]
        raise ConfigError("give exactly one of epsilon or reynolds", line)
    if has_eps:
        epsilon = float(_take(tree, "epsilon"))
    elif has_rey:
        _, rey_line = tree["reynolds"]
        reynolds = float(_take(tree, "reynolds"))
        if reynolds <= 0:
            raise ConfigError("reynolds must be positive", rey_line)
        epsilon = 1.0 / reynolds
    else:
        raise ConfigError("give exactly one of epsilon or reynolds")

    snaps_raw = _take(tree, "snapshots", [])
    if snaps_raw is None:
        snaps_raw = []
    if not isinstance(snaps_raw, list):
        raise ConfigError("snapshots must be a list of times")
    snapshot_times = tuple(float(v) for v, _ in snaps_raw) if snaps_raw else ()

    dtv = _take(dtmap, "value", None)
    cfg = ExperimentConfig(
        run_name=str(_take(tree, "run_name", "run")),
        n=_take(profile, "n", 1),
        c=float(_take(profile, "c", 0.07)),
        epsilon=epsilon,
        Lx=float(_take(box, "Lx", 2.0)),
        Nx=int(_take(box, "Nx", 128)),
        Ny=int(_take(box, "Ny", 129)),
        horizon=float(_take(tmap, "horizon", 60.0)),
        output_interval=float(_take(tmap, "output_interval", 0.1)),
        dt_mode=str(_take(dtmap, "mode", "cfl")),
        dt_value=None if dtv is None else float(dtv),
        cfl_safety=float(_take(dtmap, "safety", 0.5)),
        dt_max=float(_take(dtmap, "max", 0.05)),
        snapshot_times=snapshot_times,
        amplitude=float(_take(pert, "amplitude", 0.01)),
        seed=int(_take(pert, "seed", 0)),
        jmax=int(_take(pert, "jmax", 8)),
        kmax=int(_take(pert, "kmax", 8)),
        decay=float(_take(pert, "decay", 2.0)),
        dealias=bool(_take(tree, "dealias", True)),
        bc_mode=str(_take(tree, "bc_mode", "auto")),
    )
    for sub, ctx in ((profile, "profile."), (box, "box."), (dtmap, "time.dt."),
                     (tmap, "time."), (pert, "perturbation."), (tree, "")):
        _reject_unknown(sub, ctx)
    cfg.validate()
    return cfg


def load_config(path) -> tuple[ExperimentConfig, list[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    return cfg, cfg.validate()


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(cfg.to_yaml())
