import os
import subprocess
import sys

import numpy as np
import pytest

from furnacesim import NumericAbort, build_config, preset_config, run_simulation, summarize
from furnacesim.simulate import CYCLE_COLUMNS, TRACE_COLUMNS, cycles_path_for, lock_cycle, read_trace_csv


@pytest.fixture(scope="module")
def cold():
    return run_simulation(preset_config("cold_resonant"))


def short(mode="closed_loop", **kw):
    values = {"sim.mode": mode, "sim.duration": 0.02, "sim.trace_decimation": 1}
    values.update(kw)
    return build_config(values)


class TestColdResonant:
    def test_reactive_power_vanishes(self, cold):
        assert cold.summary["q_ratio_ss_max"] < 0.02

    def test_power_constant(self, cold):
        assert cold.summary["P_ss_std"] <= 0.01 * cold.summary["P_ss_mean"]

    def test_power_matches_fundamental(self, cold):
        cfg = cold.config
        V1 = cfg.spwm.M * cfg.spwm.V_dc
        assert cold.summary["P_ss_mean"] == pytest.approx(0.5 * V1 ** 2 / cfg.plant.R0, rel=0.01)

    def test_tracking_error_zero(self, cold):
        assert cold.summary["track_err_max"] < 1e-12
        assert cold.summary["lock_cycle"] == 0

    def test_energy_balance(self, cold):
        assert cold.energy["balance_error"] < 5e-3
        assert cold.summary["energy_delivered"] > 0

    def test_trace_shape(self, cold):
        tr = cold.trace
        assert tr.shape[1] == len(TRACE_COLUMNS)
        assert np.all(np.diff(tr[:, 0]) > 0)
        assert set(np.unique(tr[:, 1])) <= {-400.0, 400.0}


class TestTrace:
    def test_csv_layout(self, tmp_path):
        path = tmp_path / "run.csv"
        result = run_simulation(short(), trace_path=path)
        header, data = read_trace_csv(path)
        assert header == list(TRACE_COLUMNS)
        assert path.read_text().splitlines()[0] == "t,v_inv,i_L,P,Q,f_s,f_c,T,R,L"
        assert data.shape == result.trace.shape
        assert all(line.count(",") == 9 for line in path.read_text().splitlines())
        with open(cycles_path_for(path)) as fh:
            assert fh.readline().strip().split(",") == list(CYCLE_COLUMNS)

    def test_output_path_from_config(self, tmp_path):
        path = tmp_path / "cfg.csv"
        run_simulation(short(**{"sim.output_path": str(path), "sim.trace_decimation": 50}))
        assert path.exists() and cycles_path_for(path).exists()

    def test_decimation(self):
        a = run_simulation(short(**{"sim.trace_decimation": 1})).trace
        b = run_simulation(short(**{"sim.trace_decimation": 20})).trace
        assert np.array_equal(a[::20], b)

    def test_bytes_repeat(self, tmp_path):
        for k in range(2):
            run_simulation(short(), trace_path=tmp_path / f"{k}.csv")
        assert (tmp_path / "0.csv").read_bytes() == (tmp_path / "1.csv").read_bytes()

    def test_open_and_closed_agree_until_first_action(self):
        a = run_simulation(short("open_loop"))
        b = run_simulation(short("closed_loop"))
        n0 = a.cycles["n"][0]
        assert np.array_equal(a.trace[:n0], b.trace[:n0])
        assert a.cycles["P"][0] == b.cycles["P"][0]

    def test_open_loop_frequencies_frozen(self):
        r = run_simulation(short("open_loop"))
        assert set(r.cycles["f_s"]) == {250.0} and set(r.cycles["f_c"]) == {1000.0}

    def test_numeric_abort(self):
        with pytest.raises(NumericAbort) as info:
            run_simulation(short(**{"spwm.V_dc": 1e306}))
        assert info.value.t > 0

    def test_partial_last_cycle(self):
        r = run_simulation(short(**{"sim.duration": 0.0101}))
        assert not r.cycles["valid"][-1]
        assert r.cycles["valid"][:-1].all()


class TestSummary:
    def cycles(self, n=50, P=1.0, Q=0.0):
        return {
            "valid": np.ones(n, bool), "t_end": np.arange(1, n + 1) * 4e-3, "P": np.full(n, P),
            "Q": np.full(n, Q), "S1": np.full(n, 2.0), "f_s": np.full(n, 250.0), "f0": np.full(n, 250.0),
            "f_c": np.full(n, 1000.0),
        }

    def test_constant_trace(self):
        s = summarize(self.cycles(), P_ref=1.0)
        assert s["P_ss_std"] == 0.0 and s["P_err_max"] == 0.0 and s["track_err_max"] == 0.0

    def test_steady_window(self):
        c = self.cycles()
        c["P"][:40] = 5.0
        s = summarize(c, P_ref=1.0)
        assert s["P_ss_mean"] == 1.0

    def test_q_ratio(self):
        assert summarize(self.cycles(Q=-0.5), 1.0)["q_ratio_mean"] == pytest.approx(0.25)

    def test_empty(self):
        c = self.cycles()
        c["valid"][:] = False
        with pytest.raises(ValueError):
            summarize(c, 1.0)

    def test_lock_cycle(self):
        assert lock_cycle([0.5, 0.03, 0.01, 0.0]) == 2
        assert lock_cycle([0.0, 0.01]) == 0
        assert lock_cycle([0.0, 0.5]) is None


SNIPPET = """
import sys
from furnacesim import backend_name, build_config, run_simulation
cfg = build_config({"sim.duration": 0.012, "sim.trace_decimation": 7})
run_simulation(cfg, trace_path=sys.argv[1])
print(backend_name())
"""


def test_backends_identical(tmp_path):
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, FURNACESIM_DISABLE_JIT=flag)
        path = tmp_path / f"jit{flag}.csv"
        proc = subprocess.run([sys.executable, "-c", SNIPPET, str(path)], env=env,
                              capture_output=True, text=True, check=True)
        out[proc.stdout.strip()] = path.read_bytes()
    assert set(out) == {"numba", "python"}
    assert out["numba"] == out["python"]


class TestClosedLoopExamples:
    COLD = {"plant.alpha": 0.0, "plant.T_curie": float("inf"), "sim.trace_decimation": 1000}

    def test_inductance_drop_is_tracked(self):
        # coil 20% below the value the capacitor was tuned for: f0 rises about 11.8%
        L0 = 0.190e-3
        cfg = build_config(dict(self.COLD, **{
            "plant.L0": 0.8 * L0, "plant.C": 1 / ((2 * np.pi * 250.0) ** 2 * L0), "sim.duration": 0.5,
        }))
        r = run_simulation(cfg)
        f0 = r.cycles["f0"][-1]
        assert f0 == pytest.approx(250.0 / np.sqrt(0.8))
        f_s = r.cycles["f_s"]
        assert f_s[-1] == pytest.approx(f0, rel=0.02)
        assert np.all(np.diff(f_s[: int(np.argmax(f_s >= 0.98 * f0))]) >= 0)

    def run_step(self):
        base = build_config(self.COLD)
        cfg = base.with_overrides(**dict(self.COLD, **{
            "ctrl.P_ref": 1.2 * base.cold_resonant_power(), "spwm.f_c": 3000.0, "sim.duration": 0.3,
        }))
        return cfg, run_simulation(cfg)

    @staticmethod
    def reversals(f_c):
        steps = np.sign(np.diff(f_c))
        steps = steps[steps != 0]
        assert steps.size and steps[0] < 0
        return np.count_nonzero(np.diff(steps))

    @pytest.mark.xfail(strict=True, reason="per-cycle P ripple at carrier ratio < 6 flips the dP_e term")
    def test_power_reference_step_moves_carrier_monotonically(self):
        cfg, r = self.run_step()
        f_c = r.cycles["f_c"]
        # at the floor f_c follows the ratio guard 4*f_s, which jitters with f_s
        floor = np.flatnonzero(f_c <= 1.02 * max(cfg.ctrl["f_c_min"], 4 * r.cycles["f_s"].max()))
        assert self.reversals(f_c[: floor[0] + 1]) <= 1

    def test_carrier_monotone_while_ratio_clean(self):
        _, r = self.run_step()
        f_c = r.cycles["f_c"]
        clean = np.flatnonzero(f_c < 6 * r.cycles["f_s"])
        assert self.reversals(f_c[: clean[0]]) == 0
