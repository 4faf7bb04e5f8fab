"""Flat-key configuration mapping, CSV emission and run manifests.

Configs are flat key=value text with dotted namespaces (qbm.D=4000,
proj.L=1.0); outputs are plain CSV with a commented header block carrying
the full config echo, so every file can be re-run from its own header.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .projectors import SHARP, SMEARED, Projector
from .propagators import QBMParams
from .runner import ExperimentConfig

DEFAULTS = {
    "grid.n": 256,
    "grid.eta": 0.02,
    "qbm.m": 1.0,
    "qbm.D": 0.0,
    "qbm.hbar": 1.0,
    "proj.L": 1.0,
    "proj.a": 0.02,
    "proj.kind": SMEARED,
    "run.eps": 0.01,
    "run.total_time": 0.5,
    "run.dt": 0.001,
    "run.seed": 0,
    "run.env_switch_on": 0.0,
    "init.kind": "gaussian",
    "init.sigma": 0.1,
    "prep.tol": 1e-4,
    "prep.max_cycles": 3000,
}

_TYPES = {k: type(v) for k, v in DEFAULTS.items()}


def parse_overrides(pairs) -> dict:
    """Parse 'key=value' strings against the known schema."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"override {pair!r} is not of the form key=value")
        key, value = pair.split("=", 1)
        key = key.strip()
        if key.startswith("recipe."):
            out[key] = value.strip()
            continue
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown configuration field {key!r}")
        caster = _TYPES[key]
        try:
            out[key] = caster(value) if caster is not str else value.strip()
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse {key}={value!r}: {exc}") from None
    return out


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    m = dict(DEFAULTS)
    for key, value in mapping.items():
        if key.startswith("recipe."):
            continue
        if key not in DEFAULTS:
            raise ConfigurationError(f"unknown configuration field {key!r}")
        m[key] = value
    if m["proj.kind"] == SHARP:
        proj = Projector.sharp(m["proj.L"])
    else:
        proj = Projector.smeared(m["proj.L"], m["proj.a"])
    return ExperimentConfig(
        qbm=QBMParams(m=m["qbm.m"], D=m["qbm.D"], hbar=m["qbm.hbar"]),
        proj=proj,
        n_points=m["grid.n"],
        eta=m["grid.eta"],
        eps=m["run.eps"],
        total_time=m["run.total_time"],
        dt=m["run.dt"],
        initial=m["init.kind"],
        sigma=m["init.sigma"],
        env_switch_on_time=m["run.env_switch_on"],
        seed=m["run.seed"],
        prep_tol=m["prep.tol"],
        prep_max_cycles=m["prep.max_cycles"],
    )


def config_to_mapping(config: ExperimentConfig) -> dict:
    return {
        "grid.n": config.n_points,
        "grid.eta": config.eta,
        "qbm.m": config.qbm.m,
        "qbm.D": config.qbm.D,
        "qbm.hbar": config.qbm.hbar,
        "proj.L": config.proj.L,
        "proj.a": config.proj.a,
        "proj.kind": config.proj.kind,
        "run.eps": config.eps,
        "run.total_time": config.total_time,
        "run.dt": config.dt,
        "run.seed": config.seed,
        "run.env_switch_on": config.env_switch_on_time,
        "init.kind": config.initial,
        "init.sigma": config.sigma,
        "prep.tol": config.prep_tol,
        "prep.max_cycles": config.prep_max_cycles,
    }


def read_config_file(path) -> dict:
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            pairs.append(line)
    return parse_overrides(pairs)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    return str(value)


def write_csv(path, columns: dict, meta: dict | None = None) -> Path:
    """CSV with a commented key=value header (config echo, units, notes)."""
    path = Path(path)
    lines = [f"# zenodec {__version__}"]
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={_fmt(value)}")
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = len(arrays[0])
    if any(len(a) != n_rows for a in arrays):
        raise ConfigurationError("all CSV columns must have the same length")
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n")
    return path


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record: config snapshot, code version, seed, wall time
    and content digests of every output file."""

    recipe: str
    config: dict
    seed: int
    code_version: str = __version__
    wall_time_s: float = 0.0
    outputs: list = field(default_factory=list)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs.append({
            "path": path.name,
            "sha256": sha256_of(path),
            "bytes": path.stat().st_size,
        })

    def write(self, outdir) -> Path:
        path = Path(outdir) / "manifest.json"
        payload = {
            "recipe": self.recipe,
            "config": {k: _fmt(v) for k, v in sorted(self.config.items())},
            "seed": self.seed,
            "code_version": self.code_version,
            "wall_time_s": round(self.wall_time_s, 3),
            "outputs": self.outputs,
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path
