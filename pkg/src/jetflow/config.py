"""Experiment configuration: one TOML file, flat dotted keys, full echo.

A run is specified by a single structured text file (no environment
variables), for example

    mu = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]

    [initial]
    reduced = [0.0, 0.0, 1.0, 0.0]

    [integrator]
    step = 1e-3
    t_final = 10.0
    scheme = "symplectic-leapfrog"
    sample_stride = 10

    [analysis]
    energy = 0.5
    seeds = [[0.0, 0.0, 0.9987, 0.05]]

    [output]
    path = "run.csv"
    format = "csv"

Exactly one of initial.reduced / initial.full must be present.  The
optional [shoot] table states a boundary problem; the initial reduced
state doubles as its start point (first two entries) and momentum guess
(last two).

`flat_items` serializes a config to canonical dotted key/TOML-literal
pairs; these are echoed into every output file's metadata block and
re-parse (via `from_flat_lines`) to an equal config, which is the
round-trip contract the CLI tests hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .integrators import SCHEME_LEAPFROG, SCHEMES, IntegratorConfig

OUTPUT_FORMATS = ("csv", "tsv")


class ConfigError(Exception):
    """Malformed configuration; names the offending field."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (all collections as tuples)."""

    mu: tuple
    integrator: IntegratorConfig
    initial_reduced: tuple = None
    initial_full: tuple = None
    section_tolerance: float = 1e-10
    renorm_interval: float = 1.0
    energy: float = None
    seeds: tuple = ()
    max_crossings: int = 100
    shoot_target: tuple = None
    shoot_horizon: float = None
    shoot_tolerance: float = 1e-9
    shoot_max_iterations: int = 25
    output_path: str = "run.csv"
    output_format: str = "csv"

    def __post_init__(self):
        _check_vector("mu", self.mu, 6)
        if (self.initial_reduced is None) == (self.initial_full is None):
            raise ConfigError(
                "initial", "exactly one of initial.reduced / initial.full required")
        if self.initial_reduced is not None:
            _check_vector("initial.reduced", self.initial_reduced, 4)
        if self.initial_full is not None:
            _check_vector("initial.full", self.initial_full, 16)
            if tuple(self.initial_full[10:16]) != tuple(self.mu):
                raise ConfigError(
                    "initial.full",
                    "vertical momentum block (entries 11-16) must equal mu")
        _check_positive("analysis.section_tolerance", self.section_tolerance)
        _check_positive("analysis.renorm_interval", self.renorm_interval)
        if self.energy is not None and not math.isfinite(self.energy):
            raise ConfigError("analysis.energy", "must be finite")
        for k, seed in enumerate(self.seeds):
            _check_vector(f"analysis.seeds[{k}]", seed, 4)
        if self.max_crossings < 1:
            raise ConfigError("analysis.max_crossings", "must be at least 1")
        if self.shoot_target is not None:
            _check_vector("shoot.target", self.shoot_target, 2)
            if self.shoot_horizon is None:
                raise ConfigError("shoot.horizon", "required when shoot.target is set")
            _check_positive("shoot.horizon", self.shoot_horizon)
            _check_positive("shoot.tolerance", self.shoot_tolerance)
            if self.shoot_max_iterations < 1:
                raise ConfigError("shoot.max_iterations", "must be at least 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError("output.format",
                              f"must be one of {OUTPUT_FORMATS}")

    @property
    def delimiter(self):
        return "," if self.output_format == "csv" else "\t"


def _check_vector(name, value, length):
    if not isinstance(value, tuple) or len(value) != length:
        raise ConfigError(name, f"must be a list of {length} numbers")
    for v in value:
        if not isinstance(v, float) or not math.isfinite(v):
            raise ConfigError(name, "entries must be finite numbers")


def _check_positive(name, value):
    if not (isinstance(value, float) and math.isfinite(value) and value > 0.0):
        raise ConfigError(name, f"must be positive and finite, got {value}")


def _as_float(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"must be a number, got {value!r}")
    return float(value)


def _as_float_tuple(name, value, length=None):
    if not isinstance(value, list):
        raise ConfigError(name, "must be a list of numbers")
    out = tuple(_as_float(f"{name}[{i}]", v) for i, v in enumerate(value))
    if length is not None and len(out) != length:
        raise ConfigError(name, f"must have {length} entries, got {len(out)}")
    return out


def _as_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"must be an integer, got {value!r}")
    return value


def _as_str(name, value):
    if not isinstance(value, str):
        raise ConfigError(name, f"must be a string, got {value!r}")
    return value


def _take(table, prefix, known):
    for key in table:
        if key not in known:
            raise ConfigError(f"{prefix}{key}", "unknown key")


def from_tree(tree):
    """Build an ExperimentConfig from a parsed TOML tree."""
    _take(tree, "", {"mu", "initial", "integrator", "analysis", "shoot",
                     "output"})
    if "mu" not in tree:
        raise ConfigError("mu", "required")
    mu = _as_float_tuple("mu", tree["mu"], 6)

    initial = tree.get("initial", {})
    _take(initial, "initial.", {"reduced", "full"})
    initial_reduced = initial_full = None
    if "reduced" in initial:
        initial_reduced = _as_float_tuple("initial.reduced",
                                          initial["reduced"], 4)
    if "full" in initial:
        initial_full = _as_float_tuple("initial.full", initial["full"], 16)

    integ = tree.get("integrator", {})
    _take(integ, "integrator.",
          {"step", "t_final", "scheme", "rk_tolerance", "sample_stride"})
    for req in ("step", "t_final"):
        if req not in integ:
            raise ConfigError(f"integrator.{req}", "required")
    scheme = _as_str("integrator.scheme", integ.get("scheme", SCHEME_LEAPFROG))
    if scheme not in SCHEMES:
        raise ConfigError("integrator.scheme", f"must be one of {SCHEMES}")
    try:
        integrator = IntegratorConfig(
            step=_as_float("integrator.step", integ["step"]),
            t_final=_as_float("integrator.t_final", integ["t_final"]),
            scheme=scheme,
            rk_tolerance=_as_float("integrator.rk_tolerance",
                                   integ.get("rk_tolerance", 1e-12)),
            sample_stride=_as_int("integrator.sample_stride",
                                  integ.get("sample_stride", 1)),
        )
    except ValueError as exc:
        raise ConfigError("integrator", str(exc)) from exc

    ana = tree.get("analysis", {})
    _take(ana, "analysis.", {"section_tolerance", "renorm_interval", "energy",
                             "seeds", "max_crossings"})
    seeds_raw = ana.get("seeds", [])
    if not isinstance(seeds_raw, list):
        raise ConfigError("analysis.seeds", "must be a list of 4-vectors")
    seeds = tuple(_as_float_tuple(f"analysis.seeds[{k}]", s, 4)
                  for k, s in enumerate(seeds_raw))

    shoot = tree.get("shoot", {})
    _take(shoot, "shoot.", {"target", "horizon", "tolerance", "max_iterations"})
    shoot_target = shoot_horizon = None
    if "target" in shoot:
        shoot_target = _as_float_tuple("shoot.target", shoot["target"], 2)
    if "horizon" in shoot:
        shoot_horizon = _as_float("shoot.horizon", shoot["horizon"])

    out = tree.get("output", {})
    _take(out, "output.", {"path", "format"})

    return ExperimentConfig(
        mu=mu,
        integrator=integrator,
        initial_reduced=initial_reduced,
        initial_full=initial_full,
        section_tolerance=_as_float(
            "analysis.section_tolerance", ana.get("section_tolerance", 1e-10)),
        renorm_interval=_as_float(
            "analysis.renorm_interval", ana.get("renorm_interval", 1.0)),
        energy=(None if "energy" not in ana
                else _as_float("analysis.energy", ana["energy"])),
        seeds=seeds,
        max_crossings=_as_int("analysis.max_crossings",
                              ana.get("max_crossings", 100)),
        shoot_target=shoot_target,
        shoot_horizon=shoot_horizon,
        shoot_tolerance=_as_float("shoot.tolerance",
                                  shoot.get("tolerance", 1e-9)),
        shoot_max_iterations=_as_int("shoot.max_iterations",
                                     shoot.get("max_iterations", 25)),
        output_path=_as_str("output.path", out.get("path", "run.csv")),
        output_format=_as_str("output.format", out.get("format", "csv")),
    )


def load_config(path):
    """Parse and validate a TOML experiment file."""
    try:
        with open(path, "rb") as fh:
            tree = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"invalid TOML in {path}: {exc}") from exc
    return from_tree(tree)


def _fmt(value):
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def flat_items(cfg):
    """Canonical (dotted key, TOML literal) pairs for the metadata echo."""
    items = [("mu", _fmt(cfg.mu))]
    if cfg.initial_reduced is not None:
        items.append(("initial.reduced", _fmt(cfg.initial_reduced)))
    else:
        items.append(("initial.full", _fmt(cfg.initial_full)))
    items += [
        ("integrator.step", _fmt(cfg.integrator.step)),
        ("integrator.t_final", _fmt(cfg.integrator.t_final)),
        ("integrator.scheme", _fmt(cfg.integrator.scheme)),
        ("integrator.rk_tolerance", _fmt(cfg.integrator.rk_tolerance)),
        ("integrator.sample_stride", _fmt(cfg.integrator.sample_stride)),
        ("analysis.section_tolerance", _fmt(cfg.section_tolerance)),
        ("analysis.renorm_interval", _fmt(cfg.renorm_interval)),
    ]
    if cfg.energy is not None:
        items.append(("analysis.energy", _fmt(cfg.energy)))
    if cfg.seeds:
        items.append(("analysis.seeds", _fmt(cfg.seeds)))
    items.append(("analysis.max_crossings", _fmt(cfg.max_crossings)))
    if cfg.shoot_target is not None:
        items += [
            ("shoot.target", _fmt(cfg.shoot_target)),
            ("shoot.horizon", _fmt(cfg.shoot_horizon)),
            ("shoot.tolerance", _fmt(cfg.shoot_tolerance)),
            ("shoot.max_iterations", _fmt(cfg.shoot_max_iterations)),
        ]
    items += [
        ("output.path", _fmt(cfg.output_path)),
        ("output.format", _fmt(cfg.output_format)),
    ]
    return items


def from_flat_lines(lines):
    """Rebuild a config from echoed `key = literal` lines (round trip)."""
    text = "\n".join(lines)
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"invalid echoed config: {exc}") from exc
    return from_tree(tree)


def with_overrides(cfg, step=None, t_final=None, out=None):
    """Apply CLI override flags, revalidating."""
    integrator = cfg.integrator
    if step is not None or t_final is not None:
        try:
            integrator = replace(
                integrator,
                step=integrator.step if step is None else step,
                t_final=integrator.t_final if t_final is None else t_final)
        except ValueError as exc:
            which = "integrator.step" if step is not None else "integrator.t_final"
            raise ConfigError(which, str(exc)) from exc
    return replace(cfg, integrator=integrator,
                   output_path=cfg.output_path if out is None else out)
