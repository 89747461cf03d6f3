"""Schmidt-diagonal two-mode states ``sum_n d_n |n, n>`` and their entanglement measures.

Quadratures follow ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``,
so the vacuum variance of either quadrature is 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError, DegenerateFitError, DomainError, TruncationError

NORM_TOL = 1e-12
# looser check used by operations that only need "normalized enough"
CONTRACT_TOL = 1e-10


@dataclass(frozen=True)
class Truncation:
    """Policy for choosing the Fock cutoff of a geometric Schmidt spectrum.

    ``n_max = max(min_n, ceil(ln(tail_tol) / (2 ln lambda)) + margin)``, refused
    beyond ``cap``. Setting ``n_max`` bypasses the rule entirely.
    """

    tail_tol: float = 1e-12
    min_n: int = 16
    margin: int = 8
    cap: int = 4096
    n_max: Optional[int] = None

    def n_max_for(self, lam: float) -> int:
        if self.n_max is not None:
            if self.n_max < 0:
                raise DomainError(f"n_max must be nonnegative, got {self.n_max}")
            return int(self.n_max)
        if lam == 0.0:
            return self.min_n
        needed = math.ceil(math.log(self.tail_tol) / (2.0 * math.log(lam))) + self.margin
        n = max(self.min_n, needed)
        if n > self.cap:
            raise TruncationError(
                f"lambda={lam!r} needs n_max={n} which exceeds the cap {self.cap}"
            )
        return n


DEFAULT_TRUNCATION = Truncation()


@dataclass(frozen=True)
class SchmidtDiagonalState:
    """Pure two-mode state with amplitudes ``d_0 .. d_{n_max}`` on ``|n, n>``.

    Instances are immutable; the amplitude array is flagged read-only.
    """

    amplitudes: np.ndarray
    normalized: bool = field(default=True)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise ContractError("a Schmidt state needs at least one amplitude")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm2 - 1.0) > NORM_TOL:
            raise ContractError(
                f"state flagged normalized but sum |d_n|^2 = {self.norm2!r}"
            )

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "SchmidtDiagonalState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if not normalize:
            return cls(amps, normalized=False)
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        if norm == 0.0:
            raise ContractError("cannot normalize the zero vector")
        return cls(amps / norm, normalized=True)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def tail_mass(self) -> float:
        """Relative weight of the last retained Fock level."""
        return float(abs(self.amplitudes[-1]) ** 2) / self.norm2

    @property
    def mean_photon_number(self) -> float:
        n = np.arange(self.amplitudes.size)
        return float(np.dot(n, self.probabilities)) / self.norm2

    def with_phases(self, phases) -> "SchmidtDiagonalState":
        """Multiply amplitude ``n`` by ``exp(i * phases[n])`` (or a scalar phase)."""
        phases = np.broadcast_to(np.asarray(phases, dtype=float), self.amplitudes.shape)
        return SchmidtDiagonalState(self.amplitudes * np.exp(1j * phases), self.normalized)


@dataclass(frozen=True)
class DuanParams:
    """Weight ``a`` of ``U = |a| x1 + x2/a`` and ``V = |a| p1 - p2/a``."""

    a: float = 1.0

    def __post_init__(self):
        if self.a == 0 or not math.isfinite(self.a):
            raise DomainError(f"Duan weight must be finite and nonzero, got {self.a!r}")


def _require_normalized(state: SchmidtDiagonalState):
    if abs(state.norm2 - 1.0) > CONTRACT_TOL:
        raise ContractError(f"state is not normalized: sum |d_n|^2 = {state.norm2!r}")


def tmsv_from_lambda(lam: float, truncation: Truncation = DEFAULT_TRUNCATION) -> SchmidtDiagonalState:
    """Two-mode squeezed vacuum ``sqrt(1 - lam^2) sum_n (-lam)^n |n, n>``.

    The cutoff is chosen by ``truncation`` so that the discarded geometric tail
    stays below ``truncation.tail_tol``.
    """
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam!r}", value=lam)
    n_max = truncation.n_max_for(lam)
    n = np.arange(n_max + 1)
    amps = math.sqrt(1.0 - lam * lam) * (-lam) ** n
    norm2 = float(np.sum(amps**2))
    # an explicit small n_max may leave a visible tail; only then renormalize
    if abs(norm2 - 1.0) > NORM_TOL:
        amps = amps / math.sqrt(norm2)
    return SchmidtDiagonalState(amps.astype(complex), normalized=True)


def lambda_from_squeezing_db(db: float) -> float:
    """Convert a squeezing level ``10 log10(e^{2r})`` in dB to ``lambda = tanh r``."""
    if not db >= 0.0:
        raise DomainError(f"squeezing in dB must be nonnegative, got {db!r}", value=db)
    return math.tanh(db * math.log(10.0) / 20.0)


def squeezing_db_from_lambda(lam: float) -> float:
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam!r}", value=lam)
    return 20.0 / math.log(10.0) * math.atanh(lam)


def pair_correlation(state: SchmidtDiagonalState) -> complex:
    """``<a b> = sum_n n conj(d_{n-1}) d_n``, the only nonzero second moment besides ``<n>``."""
    d = state.amplitudes
    n = np.arange(1, d.size)
    return complex(np.sum(n * np.conj(d[:-1]) * d[1:]))


def duan_variance_sum(state: SchmidtDiagonalState, params: DuanParams = DuanParams()) -> float:
    """``<(dU)^2> + <(dV)^2>`` from the Fock moments of a Schmidt-diagonal state.

    For such states all first moments and ``<a^2>``, ``<a b^dag>`` vanish, so

        (a^2 + 1/a^2)(2<n> + 1) + 4 sign(a) Re<a b>.
    """
    _require_normalized(state)
    a = params.a
    nbar = state.mean_photon_number
    s = pair_correlation(state)
    return (a * a + 1.0 / (a * a)) * (2.0 * nbar + 1.0) + 4.0 * math.copysign(1.0, a) * s.real


def entropy_of_entanglement(state: SchmidtDiagonalState) -> float:
    """Von Neumann entropy of either reduced state, in bits."""
    _require_normalized(state)
    p = state.probabilities
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def effective_lambda(state: SchmidtDiagonalState, floor: float = 1e-12) -> float:
    """Fit ``|d_n| ~ C lambda^n`` by least squares on ``ln|d_n|`` and return ``lambda``.

    Only amplitudes with modulus above ``floor`` enter the fit.
    """
    _require_normalized(state)
    mod = np.abs(state.amplitudes)
    if mod[0] <= 1e-15:
        raise DegenerateFitError("vacuum amplitude vanishes; no geometric fit possible")
    n = np.flatnonzero(mod > floor)
    if n.size < 2:
        raise DegenerateFitError(f"only {n.size} amplitude(s) above {floor:g}")
    slope, _ = np.polyfit(n.astype(float), np.log(mod[n]), 1)
    return float(math.exp(slope))
