"""Fixed-step simulation driver, CSV trace export and run summaries."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._accel import backend_name
from .config import SimConfig
from .control import closed_loop_step
from .kernels import run_cycle
from .meter import invalid_frame, measure_cycle
from .plant import inductance_at, resistance_at, resonant_frequency, thermal_rate

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("t", "v_inv", "i_L", "P", "Q", "f_s", "f_c", "T", "R", "L")
CYCLE_COLUMNS = (
    "cycle", "t_end", "n", "f_s", "f_c", "P", "Q", "S1", "P_delivered",
    "T", "R", "L", "f0", "u_res", "u_pow", "valid",
)
LOCK_TOLERANCE = 0.02
STEADY_FRACTION = 0.2


class NumericAbort(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"non-finite circuit state at t={t:.9g} s")
        self.t = t


@dataclass
class SimResult:
    config: SimConfig
    cycles: dict
    trace: np.ndarray
    energy: dict
    summary: dict = field(default_factory=dict)


def run_simulation(cfg: SimConfig, trace_path=None, keep_trace: bool = True) -> SimResult:
    dt = cfg.dt
    n_total = int(round(cfg.duration / dt))
    plant = cfg.plant
    ctrl = cfg.make_controller() if cfg.closed_loop else None
    f_s, f_c = cfg.spwm.f_s, cfg.spwm.f_c
    M, V_dc = cfg.spwm.M, cfg.spwm.V_dc

    f_s_floor = min(f_s, ctrl.f_s_min) if ctrl else f_s
    n_buf = int(math.ceil(1.0 / (f_s_floor * dt))) + 2
    v_buf = np.empty(n_buf)
    i_buf = np.empty(n_buf)
    decim = cfg.trace_decimation
    n_tr = n_buf // decim + 2
    tr_t, tr_v, tr_i = np.empty(n_tr), np.empty(n_tr), np.empty(n_tr)

    state = np.zeros(2)
    phase = np.zeros(2)
    energy = np.zeros(3)
    counter = np.zeros(1, dtype=np.int64)
    T = cfg.T_init

    rows = {name: [] for name in CYCLE_COLUMNS}
    chunks = []
    cycle = 0
    while counter[0] < n_total:
        R = resistance_at(plant, T)
        L = inductance_at(plant, T)
        limit = min(n_buf, n_total - int(counter[0]))
        n, ntr, e_r, completed, finite = run_cycle(
            state, phase, energy, counter, f_s, f_c, M, V_dc, R, L, plant.C, dt,
            v_buf[:limit], i_buf[:limit], decim, tr_t, tr_v, tr_i,
        )
        if not finite:
            raise NumericAbort(float(counter[0]) * dt)
        t_cycle = n * dt
        frame = measure_cycle(v_buf[:n], i_buf[:n], cycle) if completed else invalid_frame(cycle)
        P_del = max(e_r / t_cycle, 0.0)

        if keep_trace and ntr:
            chunk = np.empty((ntr, len(TRACE_COLUMNS)))
            chunk[:, 0] = tr_t[:ntr]
            chunk[:, 1] = tr_v[:ntr]
            chunk[:, 2] = tr_i[:ntr]
            chunk[:, 3:] = (frame.P, frame.Q, f_s, f_c, T, R, L)
            chunks.append(chunk)

        for name, value in (
            ("cycle", cycle), ("t_end", float(counter[0]) * dt), ("n", n), ("f_s", f_s), ("f_c", f_c),
            ("P", frame.P), ("Q", frame.Q), ("S1", frame.S1), ("P_delivered", P_del),
            ("T", T), ("R", R), ("L", L), ("f0", resonant_frequency(L, plant.C)),
            ("valid", frame.valid),
        ):
            rows[name].append(value)

        T = T + thermal_rate(P_del, plant, T) * t_cycle
        if ctrl is not None and completed:
            cmd = closed_loop_step(ctrl, frame)
            f_s, f_c = cmd.f_s, cmd.f_c
            rows["u_res"].append(ctrl.u_res)
            rows["u_pow"].append(ctrl.u_pow)
        else:
            rows["u_res"].append(0.0)
            rows["u_pow"].append(0.0)
        cycle += 1

    cycles = {name: np.asarray(values) for name, values in rows.items()}
    trace = np.concatenate(chunks) if chunks else np.empty((0, len(TRACE_COLUMNS)))
    E_in, E_R, E_st = (float(x) for x in energy)
    energy_info = {
        "E_in": E_in, "E_R": E_R, "E_stored": E_st,
        "balance_error": abs(E_in - E_R - E_st) / abs(E_in) if E_in else 0.0,
    }
    result = SimResult(cfg, cycles, trace, energy_info)
    result.summary = summarize(cycles, cfg.P_ref, energy_info)
    result.summary.update(mode=cfg.mode, backend=backend_name(), T_final=float(T))
    if energy_info["balance_error"] > 0.005:
        logger.warning("energy balance off by %.3g%%", 100 * energy_info["balance_error"])
    path = trace_path if trace_path is not None else (cfg.output_path or None)
    if path:
        write_trace_csv(path, trace)
        write_cycles_csv(cycles_path_for(path), cycles)
    return result


def cycles_path_for(trace_path) -> Path:
    p = Path(trace_path)
    return p.with_name(p.stem + ".cycles.csv")


def lock_cycle(track_err, tol: float = LOCK_TOLERANCE):
    """First index from which every later tracking error is within ``tol`` (None if never)."""
    bad = np.flatnonzero(~(np.asarray(track_err) <= tol))
    if bad.size == 0:
        return 0
    if bad[-1] == len(track_err) - 1:
        return None
    return int(bad[-1] + 1)


def summarize(cycles: dict, P_ref: float, energy: dict | None = None) -> dict:
    """Steady-state statistics over the last 20% of the run (valid cycles only)."""
    valid = np.asarray(cycles["valid"], dtype=bool)
    if not valid.any():
        raise ValueError("no complete measurement cycle in trace")
    t = np.asarray(cycles["t_end"])[valid]
    P = np.asarray(cycles["P"])[valid]
    Q = np.asarray(cycles["Q"])[valid]
    S1 = np.asarray(cycles["S1"])[valid]
    f_s = np.asarray(cycles["f_s"])[valid]
    f0 = np.asarray(cycles["f0"])[valid]
    q_ratio = np.divide(np.abs(Q), S1, out=np.zeros_like(Q), where=S1 > 0)
    track = np.abs(f_s - f0) / f0
    p_err = np.abs(P - P_ref) / P_ref if P_ref else np.zeros_like(P)

    ss = t >= (1.0 - STEADY_FRACTION) * t[-1]
    lk = lock_cycle(track)
    out = {
        "cycles": int(valid.sum()),
        "P_ref": float(P_ref),
        "P_ss_mean": float(P[ss].mean()),
        "P_ss_std": float(P[ss].std()),
        "P_err_mean": float(p_err[ss].mean()),
        "P_err_max": float(p_err[ss].max()),
        "q_ratio_mean": float(q_ratio.mean()),
        "q_ratio_ss_mean": float(q_ratio[ss].mean()),
        "q_ratio_ss_max": float(q_ratio[ss].max()),
        "track_err_mean": float(track[ss].mean()),
        "track_err_max": float(track[ss].max()),
        "lock_cycle": -1 if lk is None else lk,
        "f_s_final": float(f_s[-1]),
        "f_c_final": float(np.asarray(cycles["f_c"])[valid][-1]),
    }
    if energy is not None:
        out["energy_delivered"] = energy["E_R"]
        out["energy_balance_error"] = energy["balance_error"]
    return out


def format_summary(summary: dict) -> str:
    lines = []
    for key, value in summary.items():
        text = f"{value:.9g}" if isinstance(value, float) else str(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def write_trace_csv(path, trace: np.ndarray):
    _write_csv(path, TRACE_COLUMNS, trace)


def write_cycles_csv(path, cycles: dict):
    arr = np.column_stack([np.asarray(cycles[name], dtype=float) for name in CYCLE_COLUMNS])
    _write_csv(path, CYCLE_COLUMNS, arr)


def _write_csv(path, columns, arr):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        if len(arr):
            np.savetxt(fh, arr, fmt="%.10g", delimiter=",")


def read_trace_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data
