"""Inner stepping loop: SPWM -> bridge -> RK4 circuit, one fundamental cycle per call.

Buffers are owned by the caller and reused between cycles. ``state``,
``phase``, ``energy`` and ``counter`` are updated in place:

    state   = [i_L, v_C]
    phase   = [theta_s (rad), theta_c (cycles)]
    energy  = [E_in, E_R, E_stored_change]   (joules, cumulative)
    counter = [global step index]
"""

import math

import numpy as np

from ._accel import njit
from .plant import rk4_step
from .spwm import advance_carrier, advance_reference, carrier_wave, inverter_voltage, reference_wave, switch_state


@njit
def run_cycle(state, phase, energy, counter, f_s, f_c, M, V_dc, R, L, C, dt,
              v_buf, i_buf, decim, tr_t, tr_v, tr_i):
    """Step until the reference phase wraps (or buffers fill).

    Samples are the held bridge voltage and the step-average load current
    (C * dv_C / dt), so ``mean(v * i)`` over a cycle is exactly the input energy
    of that cycle divided by its duration.

    Returns ``(n_samples, n_trace, resistive_energy, completed, finite)``.
    """
    i = state[0]
    v = state[1]
    ts = phase[0]
    tc = phase[1]
    k = counter[0]
    n_max = v_buf.shape[0]
    n = 0
    ntr = 0
    e_in = 0.0
    e_r = 0.0
    e_st = 0.0
    completed = False
    finite = True
    half_L = 0.5 * L
    half_C = 0.5 * C
    while n < n_max:
        s = switch_state(reference_wave(ts, M), carrier_wave(tc))
        v_in = inverter_voltage(s, V_dc)
        if k % decim == 0 and ntr < tr_t.shape[0]:
            tr_t[ntr] = k * dt
            tr_v[ntr] = v_in
            tr_i[ntr] = i
            ntr += 1
        i1, v1 = rk4_step(i, v, v_in, R, L, C, dt)
        i_avg = C * (v1 - v) / dt
        e_in += v_in * i_avg * dt
        e_r += R * 0.5 * (i * i + i1 * i1) * dt
        e_st += half_L * (i1 * i1 - i * i) + half_C * (v1 * v1 - v * v)
        v_buf[n] = v_in
        i_buf[n] = i_avg
        n += 1
        i = i1
        v = v1
        k += 1
        tc = advance_carrier(tc, f_c, dt)
        ts, wrapped = advance_reference(ts, f_s, dt)
        if not (math.isfinite(i) and math.isfinite(v)):
            finite = False
            break
        if wrapped:
            completed = True
            break
    state[0] = i
    state[1] = v
    phase[0] = ts
    phase[1] = tc
    counter[0] = k
    energy[0] += e_in
    energy[1] += e_r
    energy[2] += e_st
    return n, ntr, e_r, completed, finite


@njit
def step_response_run(V, R, L, C, dt, n):
    """Current samples of the circuit driven by a constant ``V`` from rest."""
    out = np.empty(n + 1)
    i = 0.0
    v = 0.0
    out[0] = 0.0
    for k in range(n):
        i, v = rk4_step(i, v, V, R, L, C, dt)
        out[k + 1] = i
    return out
