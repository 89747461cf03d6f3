"""Independent reference computations used to cross-check the fast paths.

None of these share code with the routines they check: the Duan oracle builds
dense two-mode operator matrices, and the distribution oracles integrate each
Gaussian branch analytically with ``erf``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import erf

from .kerr import HybridState
from .schmidt import DuanParams, SchmidtDiagonalState

SQRT2 = np.sqrt(2.0)


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def dense_duan_variance_sum(state: SchmidtDiagonalState, params: DuanParams = DuanParams()) -> float:
    """Duan variance sum from full ``(D^2 x D^2)`` operator matrices.

    One extra Fock level beyond ``n_max`` is kept so that the quadratic moments
    of the truncated state are reproduced exactly.
    """
    d = state.amplitudes
    dim = d.size + 1
    a = _ladder(dim)
    eye = np.eye(dim)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    x1 = (a1 + a1.conj().T) / SQRT2
    x2 = (a2 + a2.conj().T) / SQRT2
    p1 = (a1 - a1.conj().T) / (1j * SQRT2)
    p2 = (a2 - a2.conj().T) / (1j * SQRT2)
    w = params.a
    u_op = abs(w) * x1 + x2 / w
    v_op = abs(w) * p1 - p2 / w

    psi = np.zeros(dim * dim, dtype=complex)
    n = np.arange(d.size)
    psi[n * dim + n] = d

    def var(op):
        mean = np.vdot(psi, op @ psi)
        second = np.vdot(psi, op @ (op @ psi))
        return (second - mean**2).real

    return float(var(u_op) + var(v_op))


def _branch_means(hybrid: HybridState, theta: float):
    n = np.flatnonzero(hybrid.schmidt.probabilities > 0.0)
    p = hybrid.schmidt.probabilities[n]
    m = SQRT2 * hybrid.alpha * np.cos(n * hybrid.phi - theta)
    return m, p


def exact_cdf(hybrid: HybridState, theta: float, x) -> np.ndarray:
    """``P(X <= x)`` for the homodyne outcome, each branch being ``N(m_n, 1/2)``."""
    m, p = _branch_means(hybrid, theta)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return (0.5 * (1.0 + erf(x[:, None] - m[None, :]))) @ p


def exact_window_mass(hybrid: HybridState, theta: float, lo: float, hi: float) -> float:
    """Probability that the outcome lies in ``[lo, hi]``."""
    m, p = _branch_means(hybrid, theta)
    return float(np.dot(p, 0.5 * (erf(hi - m) - erf(lo - m))))


def ks_statistic(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and a vectorized ``cdf``."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    f = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
