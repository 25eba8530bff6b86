"""Induction-furnace supply simulator: SPWM bridge, drifting series RLC load, fuzzy loops."""

from ._accel import backend_name
from .config import ConfigError, SimConfig, build_config, load_config, parse_config, preset_config
from .simulate import NumericAbort, SimResult, run_simulation, summarize

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "NumericAbort", "SimConfig", "SimResult", "backend_name", "build_config",
    "load_config", "parse_config", "preset_config", "run_simulation", "summarize",
]
