"""INI-style experiment configuration with ``desk`` and ``paper`` presets.

Three sections, all keys optional (missing keys keep the preset value)::

    [geometry]  M N_y N_z K carrier_hz d_br d_ru spacing
    [fading]    kappa_db c0_db d0 alpha_h alpha_g alpha_f
    [run]       schemes order phases powers_dbm noise_dbm trials
                symbols_per_trial seed max_sweeps exact_limit workers random_users

Inline ``#`` comments are allowed.  List values are comma separated; ``powers_dbm`` also accepts ``start:stop:step``
(stop inclusive).  Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from hcmslp.channel import FadingParams, SystemGeometry, db_to_linear
from hcmslp.errors import ConfigurationError
from hcmslp.phases import parse_phase_option

SCHEMES = ("QAM-ZF", "QAM-SLP", "HCM-SLP", "HCM-SLP-EXACT")


class ConfigError(ConfigurationError):
    def __init__(self, msg, path=None, line=None, section=None, key=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line else f"{path}: "
        if section:
            where += f"[{section}] {key}: " if key else f"[{section}]: "
        super().__init__(where + msg)
        self.path, self.line, self.section, self.key = path, line, section, key


@dataclass(frozen=True)
class RunParams:
    schemes: tuple[str, ...] = ("QAM-ZF", "QAM-SLP", "HCM-SLP")
    order: int = 16
    phases: tuple[str, ...] = ("2", "4")
    powers_dbm: tuple[float, ...] = (40.0, 44.0, 48.0, 52.0, 56.0)
    noise_dbm: float = -80.0
    trials: int = 40
    symbols_per_trial: int = 500
    seed: int = 0
    max_sweeps: int = 20
    exact_limit: int = 16
    workers: int = 1
    random_users: bool = False

    def __post_init__(self):
        if not self.schemes or not self.phases or not self.powers_dbm:
            raise ConfigurationError("schemes, phases and powers_dbm must be nonempty")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise ConfigurationError(f"unknown scheme(s) {bad}; choose from {list(SCHEMES)}")
        if self.order not in (16, 64):
            raise ConfigurationError(f"order must be 16 or 64, got {self.order}")
        for p in self.phases:
            parse_phase_option(p)
        for name in ("trials", "symbols_per_trial", "max_sweeps", "exact_limit", "workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.seed < 0:
            raise ConfigurationError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class SimConfig:
    geometry: SystemGeometry = field(default_factory=SystemGeometry)
    fading: FadingParams = field(default_factory=FadingParams)
    run: RunParams = field(default_factory=RunParams)

    @property
    def sigma2(self) -> float:
        return dbm_to_watt(self.run.noise_dbm)


def dbm_to_watt(dbm) -> float | np.ndarray:
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


PRESETS = {
    # K = M keeps the precoder fully loaded; see README for why K < M is not used
    "desk": SimConfig(
        SystemGeometry(M=8, N_y=4, N_z=4, K=8),
        FadingParams(),
        RunParams(powers_dbm=(44.0, 48.0, 52.0, 56.0, 60.0), trials=40, symbols_per_trial=500),
    ),
    "paper": SimConfig(
        SystemGeometry(M=32, N_y=8, N_z=8, K=32),
        FadingParams(),
        RunParams(powers_dbm=tuple(float(p) for p in range(40, 72, 4)), trials=100,
                  symbols_per_trial=1000),
    ),
}

_GEOMETRY_KEYS = {
    "M": int, "N_y": int, "N_z": int, "K": int, "carrier_hz": float,
    "d_br": float, "d_ru": float, "spacing": float,
}
_FADING_KEYS = {
    "kappa_db": float, "c0_db": float, "d0": float,
    "alpha_h": float, "alpha_g": float, "alpha_f": float,
}
_RUN_KEYS = {
    "schemes": "strlist", "order": int, "phases": "strlist", "powers_dbm": "powers",
    "noise_dbm": float, "trials": int, "symbols_per_trial": int, "seed": int,
    "max_sweeps": int, "exact_limit": int, "workers": int, "random_users": bool,
}
_SECTIONS = {"geometry": _GEOMETRY_KEYS, "fading": _FADING_KEYS, "run": _RUN_KEYS}


def _parse_powers(text: str) -> tuple[float, ...]:
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + i * step) for i in range(n))
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(kind, text: str):
    if kind == "strlist":
        items = tuple(v.strip() for v in text.split(",") if v.strip())
        if not items:
            raise ValueError("empty list")
        return items
    if kind == "powers":
        return _parse_powers(text)
    if kind is bool:
        return _parse_bool(text)
    if kind is int:
        return int(text, 0)
    return kind(text)


def _line_of(raw_lines, section, key=None):
    current = None
    for i, ln in enumerate(raw_lines, start=1):
        m = re.match(r"\s*\[([^\]]+)\]", ln)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None:
            m = re.match(r"\s*([^=:#;\s]+)\s*[=:]", ln)
            if m and m.group(1) == key:
                return i
    return None


def parse_config(text: str, preset: str = "desk", path="<config>") -> SimConfig:
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}", path)
    raw = text.splitlines()
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], path, line) from None

    base = PRESETS[preset]
    values: dict[str, dict] = {"geometry": {}, "fading": {}, "run": {}}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError("unknown section", path, _line_of(raw, section), section)
        for key, text_val in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError("unknown key", path, _line_of(raw, section, key), section, key)
            try:
                values[section][key] = _convert(_SECTIONS[section][key], text_val)
            except ValueError as exc:
                raise ConfigError(f"invalid value {text_val!r} ({exc})", path,
                                  _line_of(raw, section, key), section, key) from None

    def build(section, fn):
        try:
            return fn(values[section])
        except ConfigurationError as exc:
            key = next(iter(values[section]), None)
            for k in values[section]:
                if k in str(exc):
                    key = k
                    break
            line = _line_of(raw, section, key) if key else None
            raise ConfigError(str(exc), path, line, section, key) from None

    geom = build("geometry", lambda v: replace(base.geometry, user_angles=None, **v)
                 if v else base.geometry)
    fading = build("fading", lambda v: replace(base.fading, **_fading_linear(v)))
    run = build("run", lambda v: replace(base.run, **v))
    return SimConfig(geom, fading, run)


def _fading_linear(v: dict) -> dict:
    out = dict(v)
    if "kappa_db" in out:
        out["kappa"] = db_to_linear(out.pop("kappa_db"))
    if "c0_db" in out:
        out["c0"] = db_to_linear(out.pop("c0_db"))
    return out


def load_config(path=None, preset: str = "desk") -> SimConfig:
    if path is None:
        return parse_config("", preset)
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    return parse_config(text, preset, path)


def to_ini(cfg: SimConfig) -> str:
    g, f, r = cfg.geometry, cfg.fading, cfg.run
    lines = ["[geometry]"]
    lines += [f"{k} = {getattr(g, k)}" for k in _GEOMETRY_KEYS]
    lines += ["", "[fading]",
              f"kappa_db = {float(10 * np.log10(f.kappa))!r}", f"c0_db = {float(10 * np.log10(f.c0))!r}",
              f"d0 = {f.d0}", f"alpha_h = {f.alpha_h}", f"alpha_g = {f.alpha_g}",
              f"alpha_f = {f.alpha_f}", "", "[run]"]
    for fl in fields(r):
        v = getattr(r, fl.name)
        lines.append(f"{fl.name} = {', '.join(str(x) for x in v) if isinstance(v, tuple) else v}")
    return "\n".join(lines) + "\n"
