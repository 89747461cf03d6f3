"""Cross-Kerr coupling between Bob's mode and a coherent ancilla.

After the interaction the three-mode state is ``sum_n c_n |n, n> |alpha e^{i n phi}>``.
It is stored as the Schmidt state plus ``(alpha, phi)``; the coherent label of
branch ``n`` is recomputed on demand, so no tensor product is ever built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .schmidt import SchmidtDiagonalState, _require_normalized


@dataclass(frozen=True)
class HybridState:
    """Schmidt state entangled with coherent ancilla labels ``alpha * exp(i n phi)``.

    ``phi`` is the nonlinear phase ``-kappa * t``; only the product is kept.
    """

    schmidt: SchmidtDiagonalState
    alpha: float
    phi: float

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise DomainError(f"coherent amplitude must be >= 0, got {self.alpha!r}", value=self.alpha)
        if not math.isfinite(self.phi):
            raise DomainError(f"nonlinear phase must be finite, got {self.phi!r}", value=self.phi)

    @property
    def n_max(self) -> int:
        return self.schmidt.n_max

    def label(self, n) -> complex | np.ndarray:
        """Coherent amplitude attached to Fock branch ``n``."""
        n = np.asarray(n)
        out = self.alpha * np.exp(1j * n * self.phi)
        return complex(out) if out.ndim == 0 else out

    def labels(self) -> np.ndarray:
        return self.label(np.arange(self.n_max + 1))

    def relabel(self, extra_phi: float) -> "HybridState":
        """Further Kerr evolution: label phases add."""
        return HybridState(self.schmidt, self.alpha, self.phi + extra_phi)


def apply_cross_kerr(state: SchmidtDiagonalState, alpha: float, phi: float) -> HybridState:
    """Couple Bob's half of ``state`` to the coherent state ``|alpha>``.

    ``alpha`` is taken real and nonnegative; put any ancilla phase into the
    measurement angle instead.
    """
    _require_normalized(state)
    return HybridState(state, float(alpha), float(phi))
