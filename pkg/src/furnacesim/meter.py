"""Per-cycle active/reactive power from sampled inverter voltage and load current."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_SAMPLES = 64


@dataclass(frozen=True)
class MeasurementFrame:
    P: float
    Q: float  # fundamental reactive power, > 0 when the current lags
    S1: float
    V1: complex
    I1: complex
    cycle_index: int = 0
    valid: bool = True

    @property
    def q_ratio(self) -> float:
        """|Q| / S1, 0 for an empty frame."""
        return abs(self.Q) / self.S1 if self.S1 > 0 else 0.0


def fundamental_phasors(v_samples, i_samples, N: int | None = None):
    """Single-bin DFT ``(2/N) * sum x[k] exp(-j 2 pi k / N)`` of both signals.

    The samples must span exactly one fundamental period. Returns
    ``None`` when fewer than ``MIN_SAMPLES`` samples are available.
    """
    v = np.asarray(v_samples, dtype=float)
    i = np.asarray(i_samples, dtype=float)
    if N is None:
        N = len(v)
    if N < MIN_SAMPLES or len(v) < N or len(i) < N:
        return None
    w = np.exp(-2j * np.pi * np.arange(N) / N)
    return 2.0 / N * np.dot(v[:N], w), 2.0 / N * np.dot(i[:N], w)


def compute_powers(V1: complex, I1: complex, v_samples, i_samples, cycle_index: int = 0) -> MeasurementFrame:
    v = np.asarray(v_samples, dtype=float)
    i = np.asarray(i_samples, dtype=float)
    S = 0.5 * V1 * np.conj(I1)
    return MeasurementFrame(
        P=float(np.mean(v * i)),
        Q=float(S.imag),
        S1=float(0.5 * abs(V1) * abs(I1)),
        V1=complex(V1),
        I1=complex(I1),
        cycle_index=cycle_index,
    )


def invalid_frame(cycle_index: int = 0) -> MeasurementFrame:
    return MeasurementFrame(0.0, 0.0, 0.0, 0j, 0j, cycle_index, valid=False)


def measure_cycle(v_samples, i_samples, cycle_index: int = 0) -> MeasurementFrame:
    phasors = fundamental_phasors(v_samples, i_samples)
    if phasors is None:
        return invalid_frame(cycle_index)
    return compute_powers(*phasors, v_samples, i_samples, cycle_index)
