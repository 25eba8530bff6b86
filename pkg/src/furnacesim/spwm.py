"""Bipolar sinusoidal PWM for a single-phase full bridge.

The reference phase is kept in radians, the carrier phase in cycles; both are
free-running accumulators so frequency commands never make the waveforms jump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit

TWO_PI = 2.0 * math.pi


class SpwmConfigError(ValueError):
    pass


@dataclass
class SpwmConfig:
    f_s: float = 250.0
    f_c: float = 1000.0
    M: float = 0.8
    V_dc: float = 400.0

    def validate(self):
        if not 0.0 < self.M <= 1.0:
            raise SpwmConfigError(f"modulation index must be in (0, 1], got {self.M}")
        if not self.f_s > 0:
            raise SpwmConfigError(f"spwm.f_s must be > 0, got {self.f_s}")
        if not self.f_c >= 2.0 * self.f_s:
            raise SpwmConfigError(f"spwm.f_c={self.f_c} must be at least 2*f_s={2 * self.f_s}")
        if not self.V_dc > 0:
            raise SpwmConfigError(f"spwm.V_dc must be > 0, got {self.V_dc}")
        return self


@dataclass
class PhaseState:
    theta_s: float = 0.0  # radians, [0, 2*pi)
    theta_c: float = 0.0  # cycles, [0, 1)


@njit
def reference_wave(theta_s, M):
    return M * math.sin(theta_s)


@njit
def carrier_wave(theta_c):
    return 1.0 - 4.0 * abs(theta_c - 0.5)


@njit
def switch_state(ref, car):
    # ties go to +1
    return 1.0 if ref >= car else -1.0


@njit
def inverter_voltage(s, V_dc):
    return s * V_dc


@njit
def advance_reference(theta_s, f_s, dt):
    """Return (new phase, wrapped) for the reference accumulator."""
    theta_s += TWO_PI * f_s * dt
    if theta_s >= TWO_PI:
        return theta_s - TWO_PI * math.floor(theta_s / TWO_PI), True
    return theta_s, False


@njit
def advance_carrier(theta_c, f_c, dt):
    theta_c += f_c * dt
    if theta_c >= 1.0:
        theta_c -= math.floor(theta_c)
    return theta_c


def advance_phases(phase: PhaseState, f_s: float, f_c: float, dt: float) -> PhaseState:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    theta_s, _ = advance_reference(phase.theta_s, f_s, dt)
    return PhaseState(theta_s, advance_carrier(phase.theta_c, f_c, dt))


@njit
def switching_sequence(theta_s0, theta_c0, f_s, f_c, M, dt, n):
    """Switching function over ``n`` steps at fixed frequencies (analysis helper)."""
    out = np.empty(n)
    ts = theta_s0
    tc = theta_c0
    for k in range(n):
        out[k] = switch_state(reference_wave(ts, M), carrier_wave(tc))
        ts, _ = advance_reference(ts, f_s, dt)
        tc = advance_carrier(tc, f_c, dt)
    return out
