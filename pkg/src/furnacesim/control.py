"""Resonance-tracking and power-regulating fuzzy loops.

Both controllers are incremental: the defuzzified output is a frequency step
applied once per completed fundamental cycle. The resonance loop drives the
fundamental reactive power to zero through f_s (no reference input); the power
loop acts on the carrier frequency with an inverse sign by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fuzzy import POWER_RULES, RESONANCE_RULES, FuzzyController, controller_from_rules
from .meter import MeasurementFrame

CARRIER_RATIO_MIN = 4.0


class ControlConfigError(ValueError):
    pass


def _clamp(x, lo, hi):
    return lo if x < lo else hi if x > hi else x


@dataclass
class ControllerState:
    P_ref: float
    f_s: float
    f_c: float
    K_qe: float
    K_dqe: float
    K_pe: float
    K_dpe: float
    K_fs: float
    K_fc: float
    f_s_min: float = 200.0
    f_s_max: float = 500.0
    f_c_min: float = 1000.0
    f_c_max: float = 5000.0
    sign_fc: int = -1
    prev_P: float | None = None
    prev_Q: float | None = None
    u_res: float = 0.0
    u_pow: float = 0.0
    resonance: FuzzyController = field(default_factory=lambda: controller_from_rules(RESONANCE_RULES), repr=False)
    power: FuzzyController = field(default_factory=lambda: controller_from_rules(POWER_RULES), repr=False)

    def validate(self):
        if not 0 < self.f_s_min <= self.f_s <= self.f_s_max:
            raise ControlConfigError(
                f"need 0 < f_s_min <= f_s <= f_s_max, got {self.f_s_min}, {self.f_s}, {self.f_s_max}"
            )
        if not 0 < self.f_c_min <= self.f_c <= self.f_c_max:
            raise ControlConfigError(
                f"need 0 < f_c_min <= f_c <= f_c_max, got {self.f_c_min}, {self.f_c}, {self.f_c_max}"
            )
        if self.f_c_max < CARRIER_RATIO_MIN * self.f_s_max:
            raise ControlConfigError(
                f"carrier ratio guard: f_c_max={self.f_c_max} < {CARRIER_RATIO_MIN:g}*f_s_max"
            )
        if self.sign_fc not in (1, -1):
            raise ControlConfigError("ctrl.sign_fc must be +1 or -1")
        for name in ("K_qe", "K_dqe", "K_pe", "K_dpe", "K_fs", "K_fc"):
            if not getattr(self, name) >= 0:
                raise ControlConfigError(f"ctrl.{name} must be >= 0")
        return self


@dataclass(frozen=True)
class ControlCommand:
    f_s: float
    f_c: float


def default_gains(V_dc: float, I_rated: float, f_s_nominal: float, f_c_nominal: float) -> dict:
    S_rated = V_dc * I_rated
    k = 1.0 / S_rated
    return dict(
        K_qe=k, K_dqe=5.0 * k, K_pe=k, K_dpe=5.0 * k,
        K_fs=0.02 * f_s_nominal, K_fc=0.05 * f_c_nominal,
    )


def resonance_update(state: ControllerState, frame: MeasurementFrame) -> tuple[float, float]:
    """Return ``(new f_s, u)``; an invalid frame holds f_s."""
    if not frame.valid:
        return state.f_s, 0.0
    dQ = 0.0 if state.prev_Q is None else frame.Q - state.prev_Q
    e = _clamp(state.K_qe * frame.Q, -1.0, 1.0)
    de = _clamp(state.K_dqe * dQ, -1.0, 1.0)
    u = state.resonance(e, de)
    return _clamp(state.f_s + state.K_fs * u, state.f_s_min, state.f_s_max), u


def power_update(state: ControllerState, frame: MeasurementFrame) -> tuple[float, float]:
    """Return ``(new f_c, u)``; an invalid frame holds f_c."""
    if not frame.valid:
        return state.f_c, 0.0
    err = state.P_ref - frame.P
    d_err = 0.0 if state.prev_P is None else err - (state.P_ref - state.prev_P)
    e = _clamp(state.K_pe * err, -1.0, 1.0)
    de = _clamp(state.K_dpe * d_err, -1.0, 1.0)
    u = state.power(e, de)
    return _clamp(state.f_c + state.sign_fc * state.K_fc * u, state.f_c_min, state.f_c_max), u


def closed_loop_step(state: ControllerState, frame: MeasurementFrame) -> ControlCommand:
    """Run both loops on one frame, update ``state`` in place and return the command."""
    f_s, state.u_res = resonance_update(state, frame)
    f_c, state.u_pow = power_update(state, frame)
    f_c = max(f_c, CARRIER_RATIO_MIN * f_s)
    state.f_s, state.f_c = f_s, f_c
    if frame.valid:
        state.prev_P, state.prev_Q = frame.P, frame.Q
    return ControlCommand(f_s, f_c)
