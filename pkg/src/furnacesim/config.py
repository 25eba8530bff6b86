"""Flat ``key = value`` simulator configuration.

One key per line, ``#`` starts a comment. Keys are namespaced
(``sim.``, ``plant.``, ``spwm.``, ``ctrl.``, ``fuzzy.``) and carry SI units,
except the thermal constants which follow the calorimetric convention
(``plant.c_heat`` in cal/(g*degC), ``plant.m`` in grams). Optional quantities
accept ``auto``, meaning "derive from the other keys".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .control import ControllerState, ControlConfigError, default_gains
from .fuzzy import POWER_RULES, RESONANCE_RULES, FuzzyConfigError, RuleBase, controller_from_rules, parse_rule_grid, preset, rule_grid_text
from .plant import LoadParams, PlantConfigError, resistance_at, resonant_frequency, tuned_capacitance
from .spwm import SpwmConfig, SpwmConfigError

MODES = ("open_loop", "closed_loop")

AUTO = None


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key or line."""


def _auto_float(text):
    return AUTO if text.strip().lower() == "auto" else float(text)


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _mode(text):
    text = text.strip()
    if text not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    return text


def _rules(text):
    text = text.strip()
    try:
        return preset(text)
    except FuzzyConfigError:
        return parse_rule_grid(text)


# key -> (parser, default)
SCHEMA = {
    "sim.mode": (_mode, "closed_loop"),
    "sim.dt": (float, 1e-6),
    "sim.duration": (float, 20.0),
    "sim.trace_decimation": (_int, 20),
    "sim.output_path": (str.strip, ""),
    "plant.R0": (float, 21.90e-3),
    "plant.L0": (float, 0.190e-3),
    "plant.C": (_auto_float, AUTO),
    "plant.alpha": (float, 0.004),
    "plant.T0": (float, 20.0),
    "plant.T_init": (_auto_float, AUTO),
    "plant.T_curie": (float, 770.0),
    "plant.curie_width": (float, 30.0),
    "plant.L_air_frac": (float, 0.4),
    "plant.c_heat": (float, 0.11),
    "plant.m": (float, 35_000.0),
    "plant.eta": (float, 0.8),
    "plant.cooling": (float, 0.0),
    "spwm.f_s": (float, 250.0),
    "spwm.f_c": (float, 1000.0),
    "spwm.M": (float, 0.8),
    "spwm.V_dc": (float, 400.0),
    "ctrl.P_ref": (_auto_float, AUTO),
    "ctrl.P_ref_frac": (float, 0.8),
    "ctrl.I_rated": (float, 5000.0),
    "ctrl.K_qe": (_auto_float, AUTO),
    "ctrl.K_dqe": (_auto_float, AUTO),
    "ctrl.K_pe": (_auto_float, AUTO),
    "ctrl.K_dpe": (_auto_float, AUTO),
    "ctrl.K_fs": (_auto_float, AUTO),
    "ctrl.K_fc": (_auto_float, AUTO),
    "ctrl.f_s_min": (float, 200.0),
    "ctrl.f_s_max": (float, 500.0),
    "ctrl.f_c_min": (float, 1000.0),
    "ctrl.f_c_max": (float, 5000.0),
    "ctrl.sign_fc": (_int, -1),
    "fuzzy.resonance_rules": (_rules, RESONANCE_RULES),
    "fuzzy.power_rules": (_rules, POWER_RULES),
    "fuzzy.grid_points": (_int, 1001),
}


@dataclass
class SimConfig:
    mode: str
    dt: float
    duration: float
    trace_decimation: int
    output_path: str
    T_init: float
    plant: LoadParams
    spwm: SpwmConfig
    ctrl: dict
    resonance_rules: RuleBase
    power_rules: RuleBase
    grid_points: int
    values: dict = field(repr=False, default_factory=dict)

    @property
    def closed_loop(self) -> bool:
        return self.mode == "closed_loop"

    def cold_resonant_power(self) -> float:
        """Fundamental power into the load at T_init when driven at its resonance."""
        V1 = self.spwm.M * self.spwm.V_dc
        return 0.5 * V1 * V1 / resistance_at(self.plant, self.T_init)

    @property
    def P_ref(self) -> float:
        p = self.ctrl["P_ref"]
        return self.ctrl["P_ref_frac"] * self.cold_resonant_power() if p is AUTO else p

    def f0_max(self) -> float:
        return resonant_frequency(self.plant.L_air_frac * self.plant.L0, self.plant.C)

    def make_controller(self) -> ControllerState:
        c = self.ctrl
        gains = default_gains(self.spwm.V_dc, c["I_rated"], self.spwm.f_s, self.spwm.f_c)
        for name in gains:
            if c[name] is not AUTO:
                gains[name] = c[name]
        state = ControllerState(
            P_ref=self.P_ref, f_s=self.spwm.f_s, f_c=self.spwm.f_c,
            f_s_min=c["f_s_min"], f_s_max=c["f_s_max"],
            f_c_min=c["f_c_min"], f_c_max=c["f_c_max"], sign_fc=c["sign_fc"],
            resonance=controller_from_rules(self.resonance_rules, self.grid_points),
            power=controller_from_rules(self.power_rules, self.grid_points),
            **gains,
        )
        return state.validate()

    def with_overrides(self, **overrides) -> "SimConfig":
        """Copy with flat-key overrides, e.g. ``with_overrides(**{"sim.mode": "open_loop"})``."""
        values = dict(self.values)
        for key, value in overrides.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            if isinstance(value, str):
                value = _parse_value(key, value)
            values[key] = value
        return build_config(values)

    def to_text(self) -> str:
        lines = []
        for key in SCHEMA:
            value = self.values[key]
            if value is AUTO:
                text = "auto"
            elif isinstance(value, RuleBase):
                text = _rules_text(value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"


def _rules_text(rules: RuleBase) -> str:
    for name in ("resonance5", "power9"):
        if preset(name) == rules:
            return name
    return rule_grid_text(rules)


def _parse_value(key, text):
    parser, _ = SCHEMA[key]
    try:
        return parser(text)
    except (ValueError, FuzzyConfigError) as exc:
        raise ConfigError(f"{key}: {exc}") from None


def parse_config(text: str, source: str = "<config>") -> SimConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = SCHEMA[key][0](value)
        except (ValueError, FuzzyConfigError) as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    return build_config(values)


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def build_config(overrides: dict | None = None) -> SimConfig:
    """Validated config from the defaults plus ``overrides`` (already parsed values)."""
    values = {key: default for key, (_, default) in SCHEMA.items()}
    unknown = set(overrides or {}) - set(SCHEMA)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    values.update(overrides or {})

    plant_kw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("plant.") and k != "plant.T_init"}
    spwm = SpwmConfig(**{k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("spwm.")})
    if plant_kw["C"] is AUTO:
        plant_kw["C"] = tuned_capacitance(plant_kw["L0"], spwm.f_s)
    plant = LoadParams(**plant_kw)
    T_init = plant.T0 if values["plant.T_init"] is AUTO else values["plant.T_init"]
    ctrl = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("ctrl.")}

    cfg = SimConfig(
        mode=values["sim.mode"], dt=values["sim.dt"], duration=values["sim.duration"],
        trace_decimation=values["sim.trace_decimation"], output_path=values["sim.output_path"],
        T_init=T_init, plant=plant, spwm=spwm, ctrl=ctrl,
        resonance_rules=values["fuzzy.resonance_rules"], power_rules=values["fuzzy.power_rules"],
        grid_points=values["fuzzy.grid_points"], values=values,
    )
    validate(cfg)
    return cfg


def validate(cfg: SimConfig):
    try:
        cfg.plant.validate()
        cfg.spwm.validate()
        if cfg.closed_loop:
            cfg.make_controller()
    except (PlantConfigError, SpwmConfigError, ControlConfigError, FuzzyConfigError) as exc:
        raise ConfigError(str(exc)) from None
    if not cfg.duration > 0:
        raise ConfigError("sim.duration must be > 0")
    if cfg.trace_decimation < 1:
        raise ConfigError("sim.trace_decimation must be >= 1")
    if not math.isfinite(cfg.T_init):
        raise ConfigError("plant.T_init must be finite")
    f_c_top = max(cfg.spwm.f_c, cfg.ctrl["f_c_max"]) if cfg.closed_loop else cfg.spwm.f_c
    if not 0 < cfg.dt <= 1.0 / (50.0 * f_c_top):
        raise ConfigError(
            f"stability guard: sim.dt={cfg.dt:g} s exceeds 1/(50*f_c_max) = {1 / (50 * f_c_top):g} s"
        )
    f0_top = cfg.f0_max()
    if cfg.dt > 1.0 / (50.0 * f0_top):
        raise ConfigError(
            f"stability guard: sim.dt={cfg.dt:g} s exceeds 1/(50*f0_max) = {1 / (50 * f0_top):g} s"
        )
    if cfg.grid_points < 3:
        raise ConfigError("fuzzy.grid_points must be >= 3")


def default_config() -> SimConfig:
    return build_config()


PRESETS = {
    "drift": ("closed-loop run through the Curie transition (default scenario)", {}),
    "open_loop": ("same drift with both frequencies frozen", {"sim.mode": "open_loop"}),
    "cold_resonant": (
        "open loop, no thermal drift, driven at the cold resonance",
        {"sim.mode": "open_loop", "sim.duration": 0.5, "plant.alpha": 0.0, "plant.T_curie": math.inf},
    ),
}


def preset_config(name: str) -> SimConfig:
    try:
        _, overrides = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return build_config(dict(overrides))
