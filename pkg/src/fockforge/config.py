"""Experiment configuration files.

One setting per line, ``section.key = value``; ``#`` starts a comment.
Sections are ``lattice``, ``hamiltonian``, ``plan``, ``measurement`` and
``output``. Unknown sections or keys, duplicates and malformed values are
errors that name the offending line.

:func:`dump_config` writes every setting, defaults included, in a fixed
order and format, so ``dump_config(load_config(text))`` is a canonical form
and loading it back is lossless.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

SECTIONS = ("lattice", "hamiltonian", "plan", "measurement", "output")
POTENTIAL_PROFILES = ("zero", "staggered", "linear", "harmonic")


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the line or field."""

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


# -- value codecs -----------------------------------------------------------

def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    x = float(s)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _parse_str(s: str) -> str:
    if not s:
        raise ValueError("empty value")
    return s


def _parse_float_list(s: str) -> tuple:
    if s.strip() == "":
        return ()
    return tuple(_parse_float(p.strip()) for p in s.split(","))


def _parse_int_list(s: str) -> tuple:
    if s.strip() == "":
        return ()
    return tuple(int(p.strip()) for p in s.split(","))


def _parse_labels(s: str) -> tuple:
    return () if s == "auto" else _parse_int_list(s)


def _fmt_labels(value) -> str:
    return "auto" if not value else _fmt(value)


def _parse_bits(s: str):
    return None if s == "exact" else int(s)


def _parse_potential(s: str):
    if s in POTENTIAL_PROFILES:
        return s
    return _parse_float_list(s)


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(0.0 if value == 0 else value)
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _fmt_bits(value) -> str:
    return "exact" if value is None else str(value)


def _setting(default, parse, fmt=_fmt, choices=None):
    return field(default=default, metadata={"parse": parse, "fmt": fmt, "choices": choices})


# -- sections ---------------------------------------------------------------

@dataclass(frozen=True)
class LatticeConfig:
    sites: int = _setting(4, _parse_int)
    geometry: str = _setting("ring", _parse_str, choices=("ring", "line"))
    spacing: float = _setting(1.0, _parse_float)
    particles: int = _setting(2, _parse_int)


@dataclass(frozen=True)
class HamiltonianConfig:
    hopping: float = _setting(1.0, _parse_float)
    potential: object = _setting("zero", _parse_potential)
    potential_scale: float = _setting(0.5, _parse_float)
    coulomb: float = _setting(1.0, _parse_float)


@dataclass(frozen=True)
class PlanConfig:
    algo: str = _setting("a2", _parse_str, choices=("a1", "a2", "a2-online"))
    dt: float = _setting(0.05, _parse_float)
    steps: int = _setting(20, _parse_int)
    splitting: str = _setting("strang-2", _parse_str, choices=("lie-trotter-1", "strang-2"))
    phase_bits: object = _setting(None, _parse_bits, _fmt_bits)
    initial: tuple = _setting((), _parse_labels, _fmt_labels)
    orbitals: tuple = _setting((), _parse_labels, _fmt_labels)


@dataclass(frozen=True)
class MeasurementConfig:
    scheme: str = _setting("kickback", _parse_str, choices=("vn", "kitaev", "kickback", "ramsey"))
    observable: str = _setting("hamiltonian", _parse_str,
                               choices=("hamiltonian", "random", "diagonal"))
    eigenvalues: tuple = _setting((0.0, 1.0, 2.0, 3.0), _parse_float_list)
    dimension: int = _setting(4, _parse_int)
    state: str = _setting("0", _parse_str)
    time: float = _setting(1.0, _parse_float)
    times: tuple = _setting((8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125), _parse_float_list)
    shots: int = _setting(4096, _parse_int)
    seed: int = _setting(0, _parse_int)
    pointer_size: int = _setting(8, _parse_int)
    pulse: str = _setting("pi-half", _parse_str, choices=("hadamard", "pi-half"))


@dataclass(frozen=True)
class OutputConfig:
    path: str = _setting("-", _parse_str)
    format: str = _setting("tsv", _parse_str, choices=("tsv", "csv"))


@dataclass(frozen=True)
class ExperimentConfig:
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    hamiltonian: HamiltonianConfig = field(default_factory=HamiltonianConfig)
    plan: PlanConfig = field(default_factory=PlanConfig)
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def initial_sites(self) -> tuple:
        return self.plan.initial or tuple(range(1, self.lattice.particles + 1))

    @property
    def orbital_labels(self) -> tuple:
        return self.plan.orbitals or tuple(range(1, self.lattice.particles + 1))

    def digest(self) -> str:
        return hashlib.sha256(dump_config(self).encode()).hexdigest()[:16]


def _section_fields(section_obj):
    return {f.name: f for f in fields(section_obj)}


def _validate(cfg: ExperimentConfig, where: dict) -> None:
    def fail(key, msg):
        raise ConfigError(msg, where.get(key, key))

    lat, ham, plan, meas = cfg.lattice, cfg.hamiltonian, cfg.plan, cfg.measurement
    if lat.sites < 2:
        fail("lattice.sites", "need at least 2 sites")
    if lat.spacing <= 0:
        fail("lattice.spacing", "spacing must be positive")
    if not 0 <= lat.particles <= lat.sites:
        fail("lattice.particles", f"particle number must lie in 0..{lat.sites}")
    if isinstance(ham.potential, tuple) and len(ham.potential) != lat.sites:
        fail("hamiltonian.potential", f"expected {lat.sites} values")
    if ham.coulomb < 0:
        fail("hamiltonian.coulomb", "coulomb strength must be non-negative")
    if plan.steps < 1:
        fail("plan.steps", "steps must be at least 1")
    if plan.phase_bits is not None and plan.phase_bits < 1:
        fail("plan.phase_bits", "phase bits must be positive or 'exact'")
    for key, labels in (("plan.initial", plan.initial), ("plan.orbitals", plan.orbitals)):
        if labels:
            if len(labels) != lat.particles:
                fail(key, f"expected {lat.particles} labels")
            if any(not 1 <= s <= lat.sites for s in labels):
                fail(key, f"labels must lie in 1..{lat.sites}")
            if len(set(labels)) != len(labels):
                fail(key, "labels must be distinct")
    if plan.orbitals and list(plan.orbitals) != sorted(plan.orbitals):
        fail("plan.orbitals", "orbital labels must be ascending")
    if meas.shots < 1:
        fail("measurement.shots", "shots must be at least 1")
    if meas.dimension < 1:
        fail("measurement.dimension", "dimension must be positive")
    if meas.pointer_size < 2:
        fail("measurement.pointer_size", "pointer needs at least 2 sites")
    if not meas.times or any(t <= 0 for t in meas.times):
        fail("measurement.times", "times must be a non-empty list of positive values")
    if meas.state != "random":
        try:
            int(meas.state)
        except ValueError:
            fail("measurement.state", "state must be 'random' or an eigenstate index")
    if meas.seed < 0 or meas.seed >= 1 << 64:
        fail("measurement.seed", "seed must be an unsigned 64-bit integer")


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    sections = {name: {} for name in SECTIONS}
    where = {}
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        loc = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", loc)
        lhs, value = (part.strip() for part in line.split("=", 1))
        if "." not in lhs:
            raise ConfigError(f"setting {lhs!r} lacks a section prefix", loc)
        section, key = lhs.split(".", 1)
        if section not in SECTIONS:
            raise ConfigError(f"unknown section {section!r}", loc)
        spec = _section_fields(getattr(cfg, section))
        if key not in spec:
            raise ConfigError(f"unknown key {lhs!r}", loc)
        if key in sections[section]:
            raise ConfigError(f"duplicate key {lhs!r}", loc)
        meta = spec[key].metadata
        try:
            parsed = meta["parse"](value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r} for {lhs}: {exc}", loc) from None
        if meta["choices"] and parsed not in meta["choices"]:
            raise ConfigError(f"{lhs} must be one of {', '.join(meta['choices'])}", loc)
        sections[section][key] = parsed
        where[lhs] = f"{loc} ({lhs})"
    cfg = ExperimentConfig(**{
        name: replace(getattr(cfg, name), **values) for name, values in sections.items()
    })
    _validate(cfg, where)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    return parse_config(text, str(path))


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for section in SECTIONS:
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{section}.{f.name} = {f.metadata['fmt'](getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"
