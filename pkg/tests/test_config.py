import math

import pytest

from furnacesim import ConfigError, build_config, load_config, parse_config, preset_config
from furnacesim.config import PRESETS, SCHEMA
from furnacesim.fuzzy import POWER_RULES, RESONANCE_RULES, rule_grid_text


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    assert (cfg.spwm.f_s, cfg.spwm.f_c, cfg.spwm.V_dc, cfg.spwm.M) == (250.0, 1000.0, 400.0, 0.8)
    assert cfg.mode == "closed_loop" and cfg.dt == 1e-6
    assert cfg.plant.R0 == pytest.approx(21.90e-3) and cfg.plant.L0 == pytest.approx(0.190e-3)
    assert cfg.resonance_rules == RESONANCE_RULES and cfg.power_rules == POWER_RULES


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.cfg")


def test_coarse_dt_names_guard():
    with pytest.raises(ConfigError, match="stability guard"):
        parse_config("sim.dt = 1")
    with pytest.raises(ConfigError, match="stability guard"):
        parse_config("sim.dt = 1\nsim.mode = open_loop")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"cfg:3: unknown key 'spwm.fc'"):
        parse_config("# comment\n\nspwm.fc = 900\n", "cfg")


def test_parse_errors_report_line():
    with pytest.raises(ConfigError, match=r":2: expected"):
        parse_config("sim.mode = open_loop\ngarbage\n")
    with pytest.raises(ConfigError, match=r":1: spwm.f_c"):
        parse_config("spwm.f_c = fast\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("spwm.M = 0.5\nspwm.M = 0.6\n")


def test_comments_and_whitespace():
    cfg = parse_config("  spwm.M=0.5   # half\n\nsim.mode = open_loop\n")
    assert cfg.spwm.M == 0.5 and not cfg.closed_loop


@pytest.mark.parametrize("text", [
    "spwm.M = 1.5", "plant.eta = 0", "sim.duration = 0", "sim.trace_decimation = 0",
    "ctrl.sign_fc = 2", "sim.mode = sideways", "fuzzy.grid_points = 2",
])
def test_invariant_violations(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_auto_values():
    cfg = build_config()
    assert cfg.P_ref == pytest.approx(0.8 * 0.5 * (0.8 * 400) ** 2 / 21.90e-3)
    assert cfg.T_init == cfg.plant.T0
    assert parse_config("ctrl.P_ref = 1e6").P_ref == 1e6


def test_capacitor_tracks_f_s():
    cfg = parse_config("spwm.f_s = 300\nspwm.f_c = 3000\nsim.mode = open_loop")
    assert 1 / (2 * math.pi * math.sqrt(cfg.plant.L0 * cfg.plant.C)) == pytest.approx(300.0)


def test_rule_grid_override():
    text = rule_grid_text(RESONANCE_RULES).replace("PL", "PS", 1)
    cfg = parse_config(f"fuzzy.resonance_rules = {text}")
    assert cfg.resonance_rules.cells[0][0] == "PS"
    assert parse_config("fuzzy.power_rules = power9").power_rules == POWER_RULES


def test_to_text_round_trip():
    cfg = parse_config("spwm.M = 0.7\nplant.T_curie = inf\nctrl.K_fs = 3.5\n")
    again = parse_config(cfg.to_text())
    assert again.values == cfg.values


def test_with_overrides():
    cfg = build_config().with_overrides(**{"sim.mode": "open_loop", "sim.duration": "2"})
    assert cfg.mode == "open_loop" and cfg.duration == 2.0
    with pytest.raises(ConfigError):
        cfg.with_overrides(**{"bogus": 1})


@pytest.mark.parametrize("name", list(PRESETS))
def test_presets_valid(name):
    cfg = preset_config(name)
    assert set(cfg.values) == set(SCHEMA)


def test_open_loop_preset():
    cfg = preset_config("open_loop")
    assert not cfg.closed_loop


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        preset_config("x")
