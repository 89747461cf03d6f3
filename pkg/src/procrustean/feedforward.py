"""Conditional phase correction on Bob's mode after the homodyne measurement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .homodyne import SQRT2, MeasurementOutcome
from .schmidt import DEFAULT_TRUNCATION, SchmidtDiagonalState, Truncation, _require_normalized, tmsv_from_lambda

POPULATED = 1e-10


@dataclass(frozen=True)
class CorrectionRecord:
    """What the phase shifter applied and what it could not remove.

    ``residual_max_phase`` is the largest deviation, over amplitudes above 1e-10,
    of the corrected phases from the ideal pattern ``arg d_0 + n pi`` of a real
    state ``(-lambda')^n``. ``global_phase`` is applied only for completeness;
    no entanglement measure depends on it.
    """

    gamma: float
    global_phase: float
    residual_max_phase: float
    global_phase_is_physical: bool = False


def global_phase(x: float, alpha: float, theta: float) -> float:
    """``(alpha^2 sin 2theta - 2 sqrt(2) x alpha sin theta) / 2``."""
    return 0.5 * (alpha * alpha * math.sin(2.0 * theta) - 2.0 * SQRT2 * x * alpha * math.sin(theta))


def residual_phases(state: SchmidtDiagonalState, floor: float = POPULATED) -> np.ndarray:
    """Per-amplitude deviation (wrapped to [-pi, pi)) from ``arg d_0 + n pi``."""
    d = state.amplitudes
    n = np.flatnonzero(np.abs(d) > floor)
    if n.size == 0:
        return np.zeros(0)
    ref = np.angle(d[n[0]]) - n[0] * math.pi
    dev = np.angle(d[n]) - ref - n * math.pi
    return (dev + math.pi) % (2.0 * math.pi) - math.pi


def apply_feedforward(state: SchmidtDiagonalState, outcome: MeasurementOutcome):
    """Multiply ``d_n`` by ``exp(-i (gamma n + global))`` using the linear phase model."""
    _require_normalized(state)
    g = outcome.gamma
    glob = global_phase(outcome.x_theta, outcome.alpha, outcome.theta)
    n = np.arange(state.amplitudes.size)
    corrected = state.with_phases(-(g * n + glob))
    res = residual_phases(corrected)
    record = CorrectionRecord(
        gamma=g,
        global_phase=glob,
        residual_max_phase=float(np.max(np.abs(res))) if res.size else 0.0,
    )
    return corrected, record


def strip_phases(state: SchmidtDiagonalState) -> SchmidtDiagonalState:
    """All-real idealization ``(-1)^n |d_n|`` of a state with the same moduli."""
    n = np.arange(state.amplitudes.size)
    return SchmidtDiagonalState((-1.0) ** n * np.abs(state.amplitudes), state.normalized)


def ideal_output_state(lam: float, beta: float,
                       truncation: Truncation = DEFAULT_TRUNCATION) -> SchmidtDiagonalState:
    """Two-mode squeezed vacuum with ``lambda' = (1 + beta) lambda``."""
    lam_p = (1.0 + beta) * lam
    if not (0.0 <= lam_p < 1.0):
        raise DomainError(f"lambda' = (1 + beta) lambda = {lam_p!r} is outside [0, 1)", value=lam_p)
    return tmsv_from_lambda(lam_p, truncation)
