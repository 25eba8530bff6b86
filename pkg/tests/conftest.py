import math

import pytest

from furnacesim import preset_config, run_simulation
from furnacesim.plant import tuned_capacitance

# criterion number -> (passed, detail); printed at the end of the run
ACCEPTANCE = {}

# name -> (config, result, trace path); every simulation the acceptance suite relies on
RUNS = {}

SWEEP_F_S = (200.0, 220.0, 235.0, 245.0, 250.0, 255.0, 265.0, 280.0, 320.0)
CARRIERS = (1000.0, 2000.0, 3000.0, 4000.0, 5000.0)
COLD = {"sim.mode": "open_loop", "plant.alpha": 0.0, "plant.T_curie": math.inf}


def scenario_configs():
    """Every acceptance scenario as (name, config)."""
    out = [
        ("drift_closed", preset_config("drift").with_overrides(**{"sim.trace_decimation": 1000})),
        ("drift_open", preset_config("open_loop").with_overrides(**{"sim.trace_decimation": 1000})),
        ("cold_resonant", preset_config("cold_resonant")),
    ]
    base = preset_config("cold_resonant")
    for f_s in SWEEP_F_S:
        # the capacitor stays tuned to the cold coil while the drive sweeps
        out.append((f"sweep_{f_s:g}", base.with_overrides(**{
            "spwm.f_s": f_s, "spwm.f_c": 20 * f_s, "plant.C": 2.133e-3,
            "sim.duration": 0.3, "sim.trace_decimation": 100,
        })))
    for f_c in CARRIERS:
        out.append((f"carrier_{f_c:g}", base.with_overrides(**{
            "spwm.f_c": f_c, "plant.C": tuned_capacitance(base.plant.L0, 250.0),
            "sim.duration": 1.0, "sim.trace_decimation": 1000,
        })))
    return out


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("runs")
    for name, cfg in scenario_configs():
        path = out_dir / f"{name}.csv"
        RUNS[name] = (cfg, run_simulation(cfg, trace_path=path), path)
    return RUNS


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
