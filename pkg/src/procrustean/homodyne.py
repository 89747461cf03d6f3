"""Balanced homodyne measurement of the Kerr-coupled ancilla.

Wavefunction convention
-----------------------
For a coherent label ``mu`` and measured angle ``theta`` we use

    <x_theta | mu> = pi^{-1/4} exp(-(x - m)^2 / 2) exp(i m' x - i m m' / 2)

with ``m = sqrt(2) Re(mu e^{-i theta})`` and ``m' = sqrt(2) |mu| sin(theta - arg mu)``.
For ``mu = alpha e^{i n phi}`` these are ``sqrt(2) alpha cos(n phi - theta)`` and
``sqrt(2) alpha sin(theta - n phi)``. The second mean has the opposite sign of the
textbook ``sqrt(2) Im(mu e^{-i theta})``, i.e. this is the complex conjugate of the
textbook wavefunction. Moduli (hence every density) are unaffected; with this
choice the per-photon phase at ``theta = pi/2`` is exactly ``gamma(x)`` below.

Numerics
--------
All Gaussians are evaluated in the offset ``u = x - sqrt(2) alpha cos(theta)`` and
branch offsets are formed with product-to-sum identities, so nothing cancels
catastrophically even for ``alpha ~ 1e7``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import erfc

from .errors import DomainError, GridError, ProjectionError, TruncationError
from .kerr import HybridState
from .rng import XorShift64Star
from .schmidt import SchmidtDiagonalState

SQRT2 = math.sqrt(2.0)
_LOG_PI_QUARTER = 0.25 * math.log(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_CHUNK = 2048


class DensityVariant(enum.Enum):
    EXP_BETA = "exp_beta"
    LINEAR_BETA = "linear_beta"


@dataclass(frozen=True)
class HomodyneSetting:
    """Measured angle plus the grid used for integrating and sampling the density."""

    theta: float
    x_grid_halfwidth: float = 8.0
    grid_points: int = 16384

    def __post_init__(self):
        if self.grid_points < 256:
            raise DomainError(f"grid_points must be >= 256, got {self.grid_points}")
        if not self.x_grid_halfwidth > 0:
            raise DomainError(f"grid halfwidth must be positive, got {self.x_grid_halfwidth}")


@dataclass(frozen=True)
class MeasurementOutcome:
    """A quadrature result and the quantities the feed-forward needs.

    ``density`` is the exact (non-linearized) probability density at ``x_theta``.
    """

    x_theta: float
    density: float
    beta: float
    gamma: float
    alpha: float = 0.0
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.density >= 0.0:
            raise DomainError(f"density must be nonnegative, got {self.density!r}")


def center(alpha: float, theta: float) -> float:
    """Mean ``sqrt(2) alpha cos(theta)`` of the unperturbed (n = 0) branch."""
    return SQRT2 * alpha * math.cos(theta)


def beta(x, alpha: float, phi: float, theta: float):
    """Amplitude reweighting exponent ``sqrt(2) alpha x phi sin(theta) - alpha^2 phi sin(2 theta)``.

    Evaluated as ``sqrt(2) alpha phi sin(theta) (x - sqrt(2) alpha cos(theta))`` which
    is algebraically identical and vanishes exactly at the center.
    """
    return SQRT2 * alpha * phi * math.sin(theta) * (np.asarray(x, dtype=float) - center(alpha, theta))


def gamma(x, alpha: float, phi: float, theta: float):
    """Per-photon phase ``sqrt(2) alpha phi x cos(theta) + alpha^2 phi cos(2 theta)``."""
    x = np.asarray(x, dtype=float)
    return SQRT2 * alpha * phi * x * math.cos(theta) + alpha * alpha * phi * math.cos(2.0 * theta)


def quadrature_means(label: complex, theta: float) -> tuple[float, float]:
    """``(m, m')``: means of the measured quadrature and of the conjugate one."""
    rot = complex(label) * complex(math.cos(theta), -math.sin(theta))
    return SQRT2 * rot.real, -SQRT2 * rot.imag


def coherent_quadrature_wavefunction(label: complex, theta: float, x):
    """``<x_theta | label>`` (vectorized over ``x``); see the module docstring for conventions."""
    m, mp = quadrature_means(label, theta)
    x = np.asarray(x, dtype=float)
    return np.exp(-_LOG_PI_QUARTER - 0.5 * (x - m) ** 2 + 1j * (mp * x - 0.5 * m * mp))


# -- branch geometry in offset coordinates ---------------------------------------

def _branch_offsets(alpha: float, phi: float, theta: float, n: np.ndarray):
    """``(dm_n, dm'_n)``: shift of branch ``n``'s two means relative to branch 0."""
    half = 0.5 * n * phi
    s = np.sin(half)
    dm = -2.0 * SQRT2 * alpha * s * np.sin(half - theta)
    dmp = -2.0 * SQRT2 * alpha * s * np.cos(theta - half)
    return dm, dmp


def _relative_phases(alpha: float, phi: float, theta: float, n: np.ndarray, u: float):
    """Phase of branch ``n``'s wavefunction minus that of branch 0, at offset ``u``."""
    dm, dmp = _branch_offsets(alpha, phi, theta, n)
    return dmp * u - alpha * alpha * np.sin(n * phi) - 0.5 * dm * dmp


def _branch0_phase(alpha: float, theta: float, u: float) -> float:
    mp0 = SQRT2 * alpha * math.sin(theta)
    # m'_0 x - m_0 m'_0 / 2 with x = u + m_0
    return mp0 * u + alpha * alpha * math.sin(theta) * math.cos(theta)


def _populated(hybrid: HybridState):
    p = hybrid.schmidt.probabilities
    n = np.flatnonzero(p > 0.0)
    return n, p[n]


def _density_at_offsets(hybrid: HybridState, theta: float, u: np.ndarray) -> np.ndarray:
    n, p = _populated(hybrid)
    dm, _ = _branch_offsets(hybrid.alpha, hybrid.phi, theta, n)
    u = np.asarray(u, dtype=float)
    flat = u.reshape(-1)
    out = np.empty(flat.size)
    for start in range(0, flat.size, _CHUNK):
        block = flat[start:start + _CHUNK, None]
        out[start:start + _CHUNK] = np.exp(-((block - dm) ** 2)) @ p
    return (out * _INV_SQRT_PI).reshape(u.shape)


def density_exact(hybrid: HybridState, theta: float, x):
    """``pi(x) = sum_n |c_n|^2 |<x_theta | alpha e^{i n phi}>|^2`` without linearization."""
    u = np.asarray(x, dtype=float) - center(hybrid.alpha, theta)
    out = _density_at_offsets(hybrid, theta, u)
    return float(out) if out.ndim == 0 else out


def density_closed_form(lam: float, alpha: float, phi: float, theta: float, x,
                        variant: DensityVariant = DensityVariant.EXP_BETA):
    """Geometric-sum density with per-photon weight ``e^beta`` or ``1 + beta``.

    Raises ``DomainError`` (carrying ``lambda'``) wherever ``lambda' >= 1``.
    """
    variant = DensityVariant(variant)
    x = np.asarray(x, dtype=float)
    u = x - center(alpha, theta)
    b = SQRT2 * alpha * phi * math.sin(theta) * u
    factor = np.exp(b) if variant is DensityVariant.EXP_BETA else 1.0 + b
    lam_p = factor * lam
    bad = np.abs(lam_p) >= 1.0
    if np.any(bad):
        worst = float(np.ravel(lam_p)[np.argmax(np.ravel(bad))])
        raise DomainError(f"geometric series diverges: lambda' = {worst!r} >= 1", value=worst)
    out = np.exp(-u * u) * (1.0 - lam * lam) * _INV_SQRT_PI / (1.0 - lam_p * lam_p)
    return float(out) if out.ndim == 0 else out


def _projected_amplitudes(hybrid: HybridState, theta: float, x: float):
    """Normalized post-measurement amplitudes and the density, in log-safe form."""
    alpha, phi = hybrid.alpha, hybrid.phi
    c = hybrid.schmidt.amplitudes
    n = np.arange(c.size)
    u = x - center(alpha, theta)
    dm, _ = _branch_offsets(alpha, phi, theta, n)
    with np.errstate(divide="ignore"):
        logw = np.log(np.abs(c)) - _LOG_PI_QUARTER - 0.5 * (u - dm) ** 2
    top = float(np.max(logw))
    if not np.isfinite(top):
        raise ProjectionError(f"all branches vanish at x={x!r}")
    w = np.exp(logw - top)
    norm2_scaled = float(np.sum(w * w))
    log_density = 2.0 * top + math.log(norm2_scaled)
    phase = np.angle(c) + _relative_phases(alpha, phi, theta, n, u) + _branch0_phase(alpha, theta, u)
    amps = w / math.sqrt(norm2_scaled) * np.exp(1j * phase)
    return amps, log_density


def project(hybrid: HybridState, theta: float, x: float,
            max_tail: float = 1e-10) -> tuple[SchmidtDiagonalState, MeasurementOutcome]:
    """Condition the hybrid state on the homodyne outcome ``x``.

    Returns the normalized Schmidt state of Alice and Bob (with all phases of the
    exact wavefunction retained) and the outcome record. Outcomes that push
    weight onto the last retained Fock level (relative weight above ``max_tail``)
    raise ``TruncationError``; pass ``max_tail=None`` to skip that check.
    """
    x = float(x)
    amps, log_density = _projected_amplitudes(hybrid, theta, x)
    if log_density < math.log(1e-300):
        raise ProjectionError(f"density at x={x!r} is below 1e-300; projection undefined")
    state = SchmidtDiagonalState.from_amplitudes(amps)
    if max_tail is not None and hybrid.n_max > 0 and state.tail_mass > max_tail:
        raise TruncationError(
            f"outcome x={x!r} leaves relative weight {state.tail_mass:.3g} on n_max={hybrid.n_max};"
            " raise the Fock cutoff"
        )
    outcome = MeasurementOutcome(
        x_theta=x,
        density=math.exp(log_density),
        beta=float(beta(x, hybrid.alpha, hybrid.phi, theta)),
        gamma=float(gamma(x, hybrid.alpha, hybrid.phi, theta)),
        alpha=hybrid.alpha,
        phi=hybrid.phi,
        theta=theta,
    )
    return state, outcome


def unnormalized_projection_norm2(hybrid: HybridState, theta: float, x: float) -> float:
    """``sum_n |c_n <x|alpha e^{i n phi}>|^2`` computed directly from the wavefunction."""
    psi = np.array([coherent_quadrature_wavefunction(lab, theta, x) for lab in hybrid.labels()])
    return float(np.sum(np.abs(hybrid.schmidt.amplitudes * psi) ** 2))


# -- grids and sampling ----------------------------------------------------------

@dataclass(frozen=True)
class DensityGrid:
    x: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray  # unnormalized cumulative trapezoid, cdf[-1] is the captured mass

    @property
    def mass(self) -> float:
        return float(self.cdf[-1])


def leaked_mass(hybrid: HybridState, theta: float, halfwidth: float) -> float:
    """Exact probability outside ``[center - w, center + w]`` (sum of Gaussian tails)."""
    n, p = _populated(hybrid)
    dm, _ = _branch_offsets(hybrid.alpha, hybrid.phi, theta, n)
    # each branch is N(dm, 1/2) in u
    tails = 0.5 * erfc(halfwidth - dm) + 0.5 * erfc(halfwidth + dm)
    missing = max(0.0, 1.0 - float(np.sum(p)))
    return float(np.dot(p, tails)) + missing


def density_grid(hybrid: HybridState, setting: HomodyneSetting,
                 leak_tol: float = 1e-9, max_doublings: int = 12) -> DensityGrid:
    """Tabulate ``density_exact`` on a uniform grid around the center.

    The halfwidth doubles (keeping the spacing) until the mass outside the grid
    is below ``leak_tol``.
    """
    width = setting.x_grid_halfwidth
    points = setting.grid_points
    for _ in range(max_doublings):
        if leaked_mass(hybrid, setting.theta, width) < leak_tol:
            break
        width *= 2.0
        points = 2 * points - 1
    u = np.linspace(-width, width, points)
    pdf = _density_at_offsets(hybrid, setting.theta, u)
    cdf = cumulative_trapezoid(pdf, u, initial=0.0)
    return DensityGrid(u + center(hybrid.alpha, setting.theta), pdf, cdf)


def _inverse_cdf(grid: DensityGrid, uniforms: np.ndarray) -> np.ndarray:
    target = uniforms * grid.mass
    idx = np.searchsorted(grid.cdf, target, side="right") - 1
    idx = np.clip(idx, 0, grid.x.size - 2)
    lo, hi = grid.cdf[idx], grid.cdf[idx + 1]
    span = hi - lo
    frac = np.divide(target - lo, span, out=np.full_like(target, 0.5), where=span > 0)
    return grid.x[idx] + np.clip(frac, 0.0, 1.0) * (grid.x[idx + 1] - grid.x[idx])


def sample_outcomes(hybrid: HybridState, setting: HomodyneSetting, seed: int, size: int) -> np.ndarray:
    """Draw ``size`` quadrature values by inverse-CDF sampling of the exact density."""
    grid = density_grid(hybrid, setting)
    if grid.mass < 1.0 - 1e-6:
        raise GridError(f"grid captures only {grid.mass:.9f} of the probability mass")
    return _inverse_cdf(grid, XorShift64Star(seed).uniforms(size))


def sample_outcome(hybrid: HybridState, setting: HomodyneSetting, seed: int) -> MeasurementOutcome:
    """One seeded draw; equal to the first value of ``sample_outcomes(..., seed, n)``."""
    x = float(sample_outcomes(hybrid, setting, seed, 1)[0])
    return outcome_at(hybrid, setting.theta, x)


def sample_from_seeds(hybrid: HybridState, setting: HomodyneSetting, seeds) -> np.ndarray:
    """``sample_outcome(hybrid, setting, s).x_theta`` for every ``s``, sharing one grid."""
    grid = density_grid(hybrid, setting)
    if grid.mass < 1.0 - 1e-6:
        raise GridError(f"grid captures only {grid.mass:.9f} of the probability mass")
    u = np.array([XorShift64Star(s).uniform() for s in seeds], dtype=float)
    return _inverse_cdf(grid, u)


def outcome_at(hybrid: HybridState, theta: float, x: float) -> MeasurementOutcome:
    return MeasurementOutcome(
        x_theta=x,
        density=float(density_exact(hybrid, theta, x)),
        beta=float(beta(x, hybrid.alpha, hybrid.phi, theta)),
        gamma=float(gamma(x, hybrid.alpha, hybrid.phi, theta)),
        alpha=hybrid.alpha,
        phi=hybrid.phi,
        theta=theta,
    )
