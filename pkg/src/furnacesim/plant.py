"""Series R-L-C induction-heating load with temperature-dependent R and L.

Circuit state is (inductor current, capacitor voltage); the charge
temperature follows the calorimetric law P = c*m*dT / (0.24*eta*dt), with c in
cal/(g*degC), m in grams and P in watts (0.24 cal per joule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ._accel import njit

CAL_PER_JOULE = 0.24

NOMINAL_F_S = 250.0
R0_DEFAULT = 21.90e-3
L0_DEFAULT = 0.190e-3


class PlantConfigError(ValueError):
    pass


def tuned_capacitance(L: float, f: float) -> float:
    """Capacitance that makes ``L`` resonate at ``f``."""
    return 1.0 / ((2.0 * math.pi * f) ** 2 * L)


@dataclass
class LoadParams:
    R0: float = R0_DEFAULT
    L0: float = L0_DEFAULT
    C: float | None = None  # None: tuned so the cold coil resonates at 250 Hz
    alpha: float = 0.004
    T0: float = 20.0
    T_curie: float = 770.0
    curie_width: float = 30.0
    L_air_frac: float = 0.4
    c_heat: float = 0.11
    m: float = 35_000.0
    eta: float = 0.8
    cooling: float = 0.0  # W/degC above T0

    def __post_init__(self):
        if self.C is None:
            self.C = tuned_capacitance(self.L0, NOMINAL_F_S)

    def validate(self):
        checks = [
            (self.R0 > 0, "plant.R0 must be > 0"),
            (self.L0 > 0, "plant.L0 must be > 0"),
            (self.C > 0, "plant.C must be > 0"),
            (0 < self.L_air_frac < 1, "plant.L_air_frac must be in (0, 1)"),
            (0 < self.eta <= 1, "plant.eta must be in (0, 1]"),
            (self.curie_width > 0, "plant.curie_width must be > 0"),
            (self.c_heat > 0, "plant.c_heat must be > 0"),
            (self.m > 0, "plant.m must be > 0"),
            (self.cooling >= 0, "plant.cooling must be >= 0"),
            (math.isfinite(self.alpha), "plant.alpha must be finite"),
        ]
        for ok, msg in checks:
            if not ok:
                raise PlantConfigError(msg)
        return self


@dataclass
class PlantState:
    i_L: float = 0.0
    v_C: float = 0.0
    T: float = 20.0


@njit
def logistic(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@njit
def _resistance(R0, alpha, T0, T):
    return max(R0 * (1.0 + alpha * (T - T0)), 0.1 * R0)


@njit
def _inductance(L0, L_air_frac, T_curie, curie_width, T):
    L_air = L_air_frac * L0
    if math.isinf(T_curie):
        x = math.copysign(math.inf, T_curie)
    else:
        x = (T_curie - T) / curie_width
    return L_air + (L0 - L_air) * logistic(x)


def resistance_at(params: LoadParams, T: float) -> float:
    return _resistance(params.R0, params.alpha, params.T0, T)


def inductance_at(params: LoadParams, T: float) -> float:
    return _inductance(params.L0, params.L_air_frac, params.T_curie, params.curie_width, T)


@njit
def rk4_step(i, v, v_in, R, L, C, dt):
    """One RK4 step of L di/dt = v_in - R i - v, C dv/dt = i with v_in held."""
    inv_L = 1.0 / L
    inv_C = 1.0 / C
    k1i = (v_in - R * i - v) * inv_L
    k1v = i * inv_C
    i2 = i + 0.5 * dt * k1i
    v2 = v + 0.5 * dt * k1v
    k2i = (v_in - R * i2 - v2) * inv_L
    k2v = i2 * inv_C
    i3 = i + 0.5 * dt * k2i
    v3 = v + 0.5 * dt * k2v
    k3i = (v_in - R * i3 - v3) * inv_L
    k3v = i3 * inv_C
    i4 = i + dt * k3i
    v4 = v + dt * k3v
    k4i = (v_in - R * i4 - v4) * inv_L
    k4v = i4 * inv_C
    return (
        i + dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i),
        v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )


def check_step(dt: float, L: float, C: float):
    """Raise if ``dt`` is too coarse for the resonance of (L, C)."""
    f0 = resonant_frequency(L, C)
    if not 0 < dt <= 1.0 / (50.0 * f0):
        raise PlantConfigError(
            f"stability guard: dt={dt:g} s must be <= 1/(50*f0) = {1 / (50 * f0):g} s (f0={f0:.1f} Hz)"
        )


def step_circuit(state: PlantState, v_in: float, params: LoadParams, dt: float) -> PlantState:
    R = resistance_at(params, state.T)
    L = inductance_at(params, state.T)
    check_step(dt, L, params.C)
    i, v = rk4_step(state.i_L, state.v_C, v_in, R, L, params.C, dt)
    return replace(state, i_L=i, v_C=v)


def thermal_rate(P: float, params: LoadParams, T: float | None = None) -> float:
    """dT/dt in degC/s for delivered power ``P`` (W)."""
    loss = params.cooling * (T - params.T0) if T is not None and params.cooling else 0.0
    return CAL_PER_JOULE * (params.eta * P - loss) / (params.c_heat * params.m)


def update_thermal(state: PlantState, P_delivered: float, params: LoadParams, dt: float) -> PlantState:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if P_delivered < 0:
        raise ValueError(f"delivered power must be >= 0, got {P_delivered}")
    return replace(state, T=state.T + thermal_rate(P_delivered, params, state.T) * dt)


def resonant_frequency(L: float, C: float) -> float:
    if not (L > 0 and C > 0):
        raise ValueError("L and C must be > 0")
    return 1.0 / (2.0 * math.pi * math.sqrt(L * C))


def series_impedance(f: float, R: float, L: float, C: float) -> complex:
    w = 2.0 * math.pi * f
    return complex(R, w * L - 1.0 / (w * C))


def eval_eq2(f: float, Rp: float, Qp: float, fo: float) -> complex:
    """Parallel-tank impedance Rp / (1 + j*Qp*(f/fo - fo/f))."""
    if not (f > 0 and fo > 0):
        raise ValueError("f and fo must be > 0")
    return Rp / (1.0 + 1j * Qp * (f / fo - fo / f))


def quality_factor(R: float, L: float, C: float) -> float:
    return math.sqrt(L / C) / R
