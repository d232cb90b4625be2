"""Run configuration: INI text <-> :class:`RunConfig`.

Format (all sections and keys optional except a scenario or a full [system])::

    [run]
    scenario = ddi_fig2
    grid = 201
    fields = G2, C2, C3, C4, g2norm, intensity_product
    contours = C2:level:0.0, C4:level:0.0, C3:ratio:10.0
    output = out
    workers = 1
    heatmaps = no
    dump_liouvillian = no
    dump_rho = no
    no_interaction = no

    [system]
    n_atoms = 4
    scheme = two_level            ; or three_level
    positions = 0.0, 1.0, 2.0, 3.0 ; x coordinates in lambda_p (or spacings = ...)
    omega_p = 0.01
    omega_c = 0.0
    gamma_c = 0.0
    interaction = ddi             ; none | ddi | rri
    v_nn = 2.34                   ; rri, dimensionless mode
    r_nn = 5.0
    c6 = 50                       ; rri, physical mode: 2 pi x c6 GHz um^6
    lambda_p_um = 0.780241
    gamma_p_per_s = 3.81e7

    [scaling]
    s1 = 1.0
    s2 = 1.5

    [rabi_ratio]
    omega_c_1 = 0.01
    omega_c_2 = 0.05

Keys in [system] override the scenario's values.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

import numpy as np

from .quantum import Interaction, LevelScheme, RydbergCoupling, SystemSpec, chain_positions
from .scanner import ALL_FIELDS, DEFAULT_FIELDS
from .scenarios import SCENARIOS, ContourRequest, get_scenario

RUN_KEYS = {
    "scenario", "grid", "fields", "contours", "output", "workers",
    "heatmaps", "dump_liouvillian", "dump_rho", "no_interaction",
}
SYSTEM_KEYS = {
    "n_atoms", "scheme", "positions", "spacings", "omega_p", "omega_c", "gamma_c",
    "interaction", "v_nn", "r_nn", "c6", "lambda_p_um", "gamma_p_per_s", "dipole",
}
SCHEMES = {"two_level": LevelScheme.TWO_LEVEL, "three_level": LevelScheme.THREE_LEVEL_LADDER}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    spec: SystemSpec
    scenario: str | None = None
    grid: int = 201
    fields: tuple = DEFAULT_FIELDS
    contours: tuple = ()
    output: str = "out"
    workers: int = 1
    heatmaps: bool = False
    dump_liouvillian: bool = False
    dump_rho: bool = False
    no_interaction: bool = False
    scaling: tuple | None = None
    rabi: tuple | None = None

    def effective_spec(self) -> SystemSpec:
        """The spec actually simulated (interaction switched off if requested)."""
        if self.no_interaction:
            return self.spec.evolve(interaction=Interaction.NONE)
        return self.spec


def _bool(section, key, value) -> bool:
    v = value.strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"{section}.{key}: expected yes/no, got {value!r}")


def _float(section, key, value) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}") from None


def _int(section, key, value) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}") from None


def _floats(section, key, value) -> list[float]:
    return [_float(section, key, v) for v in re.split(r"[,\s]+", value.strip()) if v]


def _contour(text: str) -> ContourRequest:
    parts = [p.strip() for p in text.split(":")]
    if len(parts) != 3 or parts[0] not in ("C2", "C3", "C4") or parts[1] not in ("level", "ratio"):
        raise ConfigError(f"run.contours: cannot parse {text!r} (expected e.g. C3:ratio:10)")
    return ContourRequest(parts[0], parts[1], _float("run", "contours", parts[2]))


def _read(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: key outside of a [section]: {exc.line.strip()!r}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"line {lineno}: cannot parse {line.strip()!r}") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate key {exc.option!r} in [{exc.section}]") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate section [{exc.section}]") from None
    return cp


def _check_keys(cp, section, allowed):
    if cp.has_section(section):
        for key in cp[section]:
            if key not in allowed:
                raise ConfigError(f"{section}.{key}: unknown key")


def _system(cp, base: SystemSpec | None) -> SystemSpec:
    sec = cp["system"] if cp.has_section("system") else {}
    if base is None and not sec:
        raise ConfigError(f"run.scenario: no scenario and no [system] section; available scenarios: {', '.join(SCENARIOS)}")
    kw = {}
    if base is not None:
        kw = dict(
            n_atoms=base.n_atoms, scheme=base.scheme, positions=base.positions, omega_p=base.omega_p,
            omega_c=base.omega_c, gamma_c=base.gamma_c, interaction=base.interaction,
            rydberg=base.rydberg, dipole=base.dipole,
        )
    if "scheme" in sec:
        try:
            kw["scheme"] = SCHEMES[sec["scheme"].strip()]
        except KeyError:
            raise ConfigError(f"system.scheme: expected one of {', '.join(SCHEMES)}, got {sec['scheme']!r}") from None
    if "interaction" in sec:
        try:
            kw["interaction"] = Interaction(sec["interaction"].strip())
        except ValueError:
            raise ConfigError(f"system.interaction: expected none, ddi or rri, got {sec['interaction']!r}") from None
    for key in ("omega_p", "omega_c", "gamma_c"):
        if key in sec:
            kw[key] = _float("system", key, sec[key])
            if not kw[key] >= 0:
                raise ConfigError(f"system.{key}: must be non-negative, got {kw[key]}")
    if "positions" in sec and "spacings" in sec:
        raise ConfigError("system.positions: give either positions or spacings, not both")
    if "positions" in sec:
        xs = _floats("system", "positions", sec["positions"])
        kw["positions"] = [(x, 0.0, 0.0) for x in xs]
    if "spacings" in sec:
        kw["positions"] = chain_positions(_floats("system", "spacings", sec["spacings"]))
    if "dipole" in sec:
        kw["dipole"] = tuple(_floats("system", "dipole", sec["dipole"]))
    if "n_atoms" in sec:
        kw["n_atoms"] = _int("system", "n_atoms", sec["n_atoms"])
    elif "positions" in kw:
        kw["n_atoms"] = len(kw["positions"])
    ryd_keys = ("v_nn", "r_nn", "c6", "lambda_p_um", "gamma_p_per_s")
    if any(k in sec for k in ryd_keys):
        old = kw.get("rydberg") or RydbergCoupling()
        vals = {k: getattr(old, k) for k in ryd_keys}
        for k in ryd_keys:
            if k in sec:
                vals[k] = _float("system", k, sec[k])
        if "v_nn" in sec and "c6" not in sec:
            vals["c6"] = None
        if "c6" in sec and "v_nn" not in sec:
            vals["v_nn"] = None
        kw["rydberg"] = RydbergCoupling(**vals)
    missing = [k for k in ("n_atoms", "scheme", "positions", "omega_p") if k not in kw]
    if missing:
        raise ConfigError(f"system.{missing[0]}: required when no scenario is given")
    try:
        return SystemSpec(**kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"system: {exc}") from None


def parse_config(text: str = "", **overrides) -> RunConfig:
    """Parse INI text; keyword ``overrides`` replace [run] values (e.g. from CLI flags)."""
    cp = _read(text)
    for section in cp.sections():
        if section not in ("run", "system", "scaling", "rabi_ratio"):
            raise ConfigError(f"[{section}]: unknown section")
    _check_keys(cp, "run", RUN_KEYS)
    _check_keys(cp, "system", SYSTEM_KEYS)
    _check_keys(cp, "scaling", {"s1", "s2"})
    _check_keys(cp, "rabi_ratio", {"omega_c_1", "omega_c_2"})
    run = dict(cp["run"]) if cp.has_section("run") else {}
    for k, v in overrides.items():
        if v is not None:
            run[k] = v if isinstance(v, str) else _as_text(v)
    scenario = None
    if run.get("scenario"):
        try:
            scenario = get_scenario(run["scenario"].strip())
        except KeyError as exc:
            raise ConfigError(f"run.scenario: {exc.args[0]}") from None
    spec = _system(cp, scenario.spec if scenario else None)

    kw = {"spec": spec, "scenario": scenario.name if scenario else None}
    if "grid" in run:
        kw["grid"] = _int("run", "grid", run["grid"])
        if kw["grid"] < 2:
            raise ConfigError(f"run.grid: need at least 2 points, got {kw['grid']}")
    if "fields" in run:
        names = tuple(f for f in re.split(r"[,\s]+", run["fields"].strip()) if f)
        for f in names:
            if f not in ALL_FIELDS:
                raise ConfigError(f"run.fields: unknown field {f!r}; available: {', '.join(ALL_FIELDS)}")
        kw["fields"] = names
    if "contours" in run:
        kw["contours"] = tuple(_contour(c) for c in run["contours"].split(",") if c.strip())
    elif scenario is not None:
        kw["contours"] = scenario.contours
    if "output" in run:
        kw["output"] = run["output"].strip()
    if "workers" in run:
        kw["workers"] = _int("run", "workers", run["workers"])
        if kw["workers"] < 1:
            raise ConfigError(f"run.workers: must be >= 1, got {kw['workers']}")
    for key in ("heatmaps", "dump_liouvillian", "dump_rho", "no_interaction"):
        if key in run:
            kw[key] = _bool("run", key, run[key])
    if cp.has_section("scaling"):
        s = cp["scaling"]
        kw["scaling"] = (_float("scaling", "s1", s.get("s1", "1.0")), _float("scaling", "s2", s.get("s2", "1.5")))
    elif scenario is not None and scenario.scaling:
        kw["scaling"] = scenario.scaling
    if kw.get("scaling") and not 0 < kw["scaling"][0] <= kw["scaling"][1]:
        raise ConfigError("scaling.s1: need 0 < s1 <= s2")
    if cp.has_section("rabi_ratio"):
        s = cp["rabi_ratio"]
        kw["rabi"] = (
            _float("rabi_ratio", "omega_c_1", s.get("omega_c_1", "0.01")),
            _float("rabi_ratio", "omega_c_2", s.get("omega_c_2", "0.05")),
        )
    elif scenario is not None and scenario.rabi:
        kw["rabi"] = scenario.rabi
    if kw.get("rabi") and min(kw["rabi"]) < 0:
        raise ConfigError("rabi_ratio.omega_c_1: coupling Rabi frequencies must be non-negative")
    return RunConfig(**kw)


def _as_text(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (tuple, list)):
        return ", ".join(map(str, v))
    return str(v)


def emit_config(cfg: RunConfig) -> str:
    """INI text that parses back to ``cfg``; the [system] section is written out in full."""
    s = cfg.spec
    lines = ["[run]"]
    if cfg.scenario:
        lines.append(f"scenario = {cfg.scenario}")
    lines += [
        f"grid = {cfg.grid}",
        f"fields = {', '.join(cfg.fields)}",
        f"contours = {', '.join(c.to_text() for c in cfg.contours)}",
        f"output = {cfg.output}",
        f"workers = {cfg.workers}",
    ]
    for key in ("heatmaps", "dump_liouvillian", "dump_rho", "no_interaction"):
        lines.append(f"{key} = {_as_text(getattr(cfg, key))}")
    scheme = next(k for k, v in SCHEMES.items() if v is s.scheme)
    pos = s.coords
    lines += ["", "[system]", f"n_atoms = {s.n_atoms}", f"scheme = {scheme}"]
    if np.any(pos[:, 1:] != 0):
        raise ConfigError("system.positions: only chains along x can be written to a config")
    lines.append("positions = " + ", ".join(repr(float(x)) for x in pos[:, 0]))
    lines += [
        f"omega_p = {s.omega_p!r}",
        f"omega_c = {s.omega_c!r}",
        f"gamma_c = {s.gamma_c!r}",
        f"interaction = {s.interaction.value}",
    ]
    if s.dipole is not None:
        lines.append("dipole = " + ", ".join(repr(c) for c in s.dipole))
    if s.rydberg is not None:
        for k in ("v_nn", "r_nn", "c6", "lambda_p_um", "gamma_p_per_s"):
            v = getattr(s.rydberg, k)
            if v is not None:
                lines.append(f"{k} = {v!r}")
    if cfg.scaling:
        lines += ["", "[scaling]", f"s1 = {cfg.scaling[0]!r}", f"s2 = {cfg.scaling[1]!r}"]
    if cfg.rabi:
        lines += ["", "[rabi_ratio]", f"omega_c_1 = {cfg.rabi[0]!r}", f"omega_c_2 = {cfg.rabi[1]!r}"]
    return "\n".join(lines) + "\n"
