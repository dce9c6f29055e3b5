"""Run-configuration parsing and validation.

Configs are flat text files of dotted ``section.key = value`` lines;
``#`` starts a comment.  Example::

    grid.L = 20
    grid.N = 512
    params.gamma = 2.0
    params.dt = 1e-3
    params.t_end = 1.0
    params.save_every = 10
    initial.kind = wavefunction
    initial.family = gaussian
    output.dir = runs/gauss

Validation is exhaustive: every violated constraint is reported, each
naming the offending field.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, asdict
from pathlib import Path

KINDS = ("wavefunction", "hydrodynamic")
FAMILIES = ("gaussian", "plane_wave", "abs_x_bump", "custom_file")
FORMATS = ("csv", "json")

OUTPUT_ROOT_ENV = "QHDLAB_OUTPUT_ROOT"


class ConfigError(ValueError):
    """One or more invalid configuration entries."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass
class GridConfig:
    L: float = 20.0
    N: int = 512


@dataclass
class ParamsConfig:
    gamma: float = 2.0
    dt: float = 1e-3
    t_end: float = 1.0
    save_every: int = 10
    dealias: bool = False


@dataclass
class InitialConfig:
    kind: str = "wavefunction"
    family: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    center: float = 0.0
    velocity: float = 0.0
    mode: int = 1  # plane_wave wavenumber index: k = mode * pi / L
    path: str = ""  # custom_file source


@dataclass
class LiftingConfig:
    delta: float = 1e-8
    tau_rel: float = 1e-8
    conditioning_floor: float = 1e-6


@dataclass
class DiagnosticsConfig:
    tau_rel: float = 1e-8
    pseudo_conformal: bool = True
    morawetz: bool = True
    entropy: bool = True
    i_growth: bool = True
    decay: bool = True
    gcp: bool = True
    lambda_measure: bool = True


@dataclass
class OutputConfig:
    dir: str = ""
    fields_every: int = 0  # 0 disables field snapshots
    formats: str = "csv,json"


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    params: ParamsConfig = field(default_factory=ParamsConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    lifting: LiftingConfig = field(default_factory=LiftingConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def as_dict(self) -> dict:
        return asdict(self)

    def resolved_output_dir(self) -> Path:
        root = os.environ.get(OUTPUT_ROOT_ENV)
        out = Path(self.output.dir)
        if root and not out.is_absolute():
            return Path(root) / out
        return out

    def canonical_text(self) -> str:
        lines = []
        for section, sub in self.as_dict().items():
            for key, value in sub.items():
                if isinstance(value, bool):
                    value = "true" if value else "false"
                lines.append(f"{section}.{key} = {value}")
        return "\n".join(lines) + "\n"


_SECTIONS = {
    "grid": GridConfig,
    "params": ParamsConfig,
    "initial": InitialConfig,
    "lifting": LiftingConfig,
    "diagnostics": DiagnosticsConfig,
    "output": OutputConfig,
}


def _coerce(raw: str, target_type, key: str, problems: list[str]):
    raw = raw.strip()
    try:
        if target_type is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if target_type is int:
            value = float(raw)
            if value != int(value):
                raise ValueError(raw)
            return int(value)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError:
        problems.append(f"{key}: cannot parse {raw!r} as {target_type.__name__}")
        return None


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    problems: list[str] = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{source}:{lineno}: expected 'section.key = value', got {line!r}")
            continue
        key, raw = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1:
            problems.append(f"{key}: keys must look like section.key")
            continue
        section, name = key.split(".")
        if section not in _SECTIONS:
            problems.append(f"{key}: unknown section {section!r}")
            continue
        target = getattr(cfg, section)
        if not hasattr(target, name):
            problems.append(f"{key}: unknown key {name!r} in section {section!r}")
            continue
        if key in seen:
            problems.append(f"{key}: duplicate entry")
            continue
        seen.add(key)
        value = _coerce(raw, type(getattr(target, name)), key, problems)
        if value is not None:
            setattr(target, name, value)

    problems.extend(validate(cfg))
    if problems:
        raise ConfigError(problems)
    return cfg


def parse_config_file(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), source=str(path))


def validate(cfg: RunConfig) -> list[str]:
    """All constraint violations, each naming the field."""
    p: list[str] = []
    g, pr, ini, lif, out = cfg.grid, cfg.params, cfg.initial, cfg.lifting, cfg.output
    if not g.L > 0:
        p.append(f"grid.L: must be positive, got {g.L}")
    if g.N < 16 or (g.N & (g.N - 1)) != 0:
        p.append(f"grid.N: must be a power of two >= 16, got {g.N}")
    if not pr.gamma > 1:
        p.append(f"params.gamma: must satisfy gamma > 1, got {pr.gamma}")
    if not pr.dt > 0:
        p.append(f"params.dt: must be positive, got {pr.dt}")
    if not pr.t_end >= pr.dt:
        p.append(f"params.t_end: must be >= dt, got {pr.t_end}")
    if pr.save_every < 1:
        p.append(f"params.save_every: must be >= 1, got {pr.save_every}")
    if ini.kind not in KINDS:
        p.append(f"initial.kind: must be one of {KINDS}, got {ini.kind!r}")
    if ini.family not in FAMILIES:
        p.append(f"initial.family: must be one of {FAMILIES}, got {ini.family!r}")
    if ini.family == "gaussian" and not ini.width > 0:
        p.append(f"initial.width: must be positive, got {ini.width}")
    if ini.family == "abs_x_bump" and not ini.width > 0:
        p.append(f"initial.width: must be positive, got {ini.width}")
    if ini.family == "custom_file" and not ini.path:
        p.append("initial.path: required for family = custom_file")
    if not ini.amplitude > 0:
        p.append(f"initial.amplitude: must be positive, got {ini.amplitude}")
    if not lif.delta > 0:
        p.append(f"lifting.delta: must be positive, got {lif.delta}")
    if not 0 < lif.tau_rel < 1:
        p.append(f"lifting.tau_rel: must lie in (0, 1), got {lif.tau_rel}")
    if not 0 < cfg.diagnostics.tau_rel < 1:
        p.append(f"diagnostics.tau_rel: must lie in (0, 1), got {cfg.diagnostics.tau_rel}")
    if not lif.conditioning_floor >= 0:
        p.append(f"lifting.conditioning_floor: must be >= 0, got {lif.conditioning_floor}")
    if not out.dir:
        p.append("output.dir: required")
    if out.fields_every < 0:
        p.append(f"output.fields_every: must be >= 0, got {out.fields_every}")
    for fmt in out.formats.split(","):
        if fmt.strip() not in FORMATS:
            p.append(f"output.formats: unsupported format {fmt.strip()!r}")
    return p
