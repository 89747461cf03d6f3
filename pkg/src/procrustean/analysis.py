"""Success criterion, success probability and feasibility algebra of the protocol.

Two flavours of the feasibility formulas are kept side by side:

* ``Variant.PAPER`` evaluates the published closed forms for the required
  reweighting ``beta`` and outcome ``x`` exactly as printed;
* ``Variant.EXACT`` solves ``V_out / V_in = nu`` by bisection.

They differ by about 7 % at ``lambda = 1/2, nu = 0.9``; the exact root is
the one that reproduces the target variance ratio.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .homodyne import SQRT2, DensityVariant, _density_at_offsets, center, density_closed_form
from .kerr import apply_cross_kerr
from .quadrature import integrate
from .schmidt import DEFAULT_TRUNCATION, Truncation, tmsv_from_lambda

# beyond this offset exp(-u^2) underflows; integrating further adds exactly nothing
GAUSS_CUT = 40.0
BISECT_XTOL = 1e-12
BRACKET_GAP = 1e-9


class Variant(enum.Enum):
    PAPER = "paper"
    EXACT = "exact"


def _check_lambda(lam: float, open_left: bool = False):
    lo_ok = lam > 0.0 if open_left else lam >= 0.0
    if not (lo_ok and lam < 1.0):
        raise DomainError(f"lambda = {lam!r} is outside {'(0' if open_left else '[0'}, 1)", value=lam)


def v_in(lam: float) -> float:
    """Duan variance sum (a = 1) of the input squeezed vacuum, ``2(1-lam)^2/(1-lam^2)``."""
    _check_lambda(lam)
    return 2.0 * (1.0 - lam) ** 2 / (1.0 - lam * lam)


def v_out(lam: float, beta: float) -> float:
    """Duan variance sum of the output state with ``lambda' = (1 + beta) lam``."""
    lam_p = (1.0 + beta) * lam
    if not (0.0 <= lam_p < 1.0):
        raise DomainError(f"lambda' = {lam_p!r} is outside [0, 1)", value=lam_p)
    return 2.0 * (1.0 - lam_p) ** 2 / (1.0 - lam_p * lam_p)


def success_criterion(x: float, alpha: float, theta: float, phi: Optional[float] = None) -> bool:
    """Whether outcome ``x`` concentrates entanglement.

    The rule is ``x > sqrt(2) alpha cos(theta)`` (strict: the boundary leaves
    ``lambda`` unchanged). Passing ``phi`` with ``phi sin(theta) < 0`` mirrors the
    rule, since ``beta > 0`` then requires ``x`` below the center.
    """
    c = center(alpha, theta)
    if phi is not None and phi * math.sin(theta) < 0.0:
        return bool(x < c)
    return bool(x > c)


def x_limit(lam: float, alpha: float, phi: float, theta: float) -> float:
    """Largest outcome for which ``(1 + beta) lam`` stays below one."""
    _check_lambda(lam, open_left=True)
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}", value=alpha)
    s = phi * math.sin(theta)
    if not s > 0.0:
        raise DomainError(f"x_limit needs phi sin(theta) > 0, got {s!r}", value=s)
    return (1.0 - lam) / (SQRT2 * lam * alpha * phi * math.sin(theta)) + center(alpha, theta)


@dataclass(frozen=True)
class SuccessBounds:
    """Integration window and success probability.

    ``ps`` integrates the linearized (``1 + beta``) density, ``ps_exact`` the exact
    one. ``singular_endpoint`` flags that the linearized integrand's pole at
    ``x_limit`` lies where the Gaussian is not negligible, so the upper panel was
    clamped and ``ps`` depends on the clamp.
    """

    x_min: float
    x_limit: float
    ps: float
    ps_exact: float
    mirrored: bool = False
    singular_endpoint: bool = False
    converged: bool = True


def success_probability(lam: float, alpha: float, phi: float, theta: float,
                        tol: float = 1e-10,
                        truncation: Truncation = DEFAULT_TRUNCATION) -> SuccessBounds:
    """Probability that the outcome lands in the concentrating window."""
    _check_lambda(lam)
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}", value=alpha)
    s = phi * math.sin(theta)
    if s == 0.0:
        raise DomainError("phi sin(theta) = 0: outcomes never change lambda", value=s)
    sign = 1.0 if s > 0.0 else -1.0
    k = SQRT2 * alpha * abs(s)
    u_lim = math.inf if lam == 0.0 else (1.0 - lam) / (lam * k)
    c = center(alpha, theta)

    # mirrored coordinate v = sign * (x - c) >= 0
    singular = u_lim < 26.0
    v_top = min(u_lim * (1.0 - BRACKET_GAP), GAUSS_CUT)

    def linear(v):
        lam_p = (1.0 + k * v) * lam
        return np.exp(-v * v) * (1.0 - lam * lam) / (math.sqrt(math.pi) * (1.0 - lam_p * lam_p))

    lin = integrate(linear, 0.0, v_top, tol=tol)

    hybrid = apply_cross_kerr(tmsv_from_lambda(lam, truncation), alpha, phi)
    n = np.flatnonzero(hybrid.schmidt.probabilities > 0.0)
    spread = float(np.max(np.abs(SQRT2 * alpha * (np.cos(n * phi - theta) - math.cos(theta)))))
    v_top_exact = min(u_lim, GAUSS_CUT + spread)
    exact = integrate(lambda v: _density_at_offsets(hybrid, theta, sign * v), 0.0, v_top_exact, tol=tol)

    x_lim = c + sign * u_lim
    return SuccessBounds(
        x_min=c,
        x_limit=x_lim,
        ps=min(max(lin.value, 0.0), 1.0),
        ps_exact=min(max(exact.value, 0.0), 1.0),
        mirrored=sign < 0.0,
        singular_endpoint=singular,
        converged=lin.converged and exact.converged,
    )


# -- feasibility -------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityQuery:
    """Target variance ratio ``nu`` (improvement ``1 - nu``) for given resources."""

    lam: float
    nu: float
    alpha: float
    phi: float
    theta: float = math.pi / 2

    def __post_init__(self):
        _check_lambda(self.lam, open_left=True)
        _check_nu(self.nu)
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}", value=self.alpha)
        if self.phi == 0.0:
            raise DomainError("phi must be nonzero", value=self.phi)
        if not (0.0 < self.theta < math.pi):
            raise DomainError(f"theta must lie in (0, pi), got {self.theta!r}", value=self.theta)


def _check_nu(nu: float):
    if nu > 1.0:
        raise DomainError(f"nu = {nu!r} > 1 asks for dilution, not concentration", value=nu)
    if not nu > 0.0:
        raise DomainError(f"nu must be positive, got {nu!r}", value=nu)


def beta_for_ratio_paper(lam: float, nu: float) -> float:
    """``(lam^2 - 1)(1 - nu) / (2 lam (lam (nu - 1) - 1))`` as published."""
    return (lam * lam - 1.0) * (1.0 - nu) / (2.0 * lam * (lam * (nu - 1.0) - 1.0))


def beta_for_ratio_closed_form(lam: float, nu: float) -> float:
    """Direct inversion of ``V_out/V_in = nu``: ``(1-nu)(1-lam^2) / (lam (nu (1-lam) + 1 + lam))``."""
    return (1.0 - nu) * (1.0 - lam * lam) / (lam * (nu * (1.0 - lam) + 1.0 + lam))


def beta_for_ratio(lam: float, nu: float, variant: Variant = Variant.EXACT) -> float:
    """Reweighting exponent ``beta`` that turns ``V_in`` into ``nu * V_in``."""
    _check_lambda(lam, open_left=True)
    _check_nu(nu)
    variant = Variant(variant)
    if variant is Variant.PAPER:
        return beta_for_ratio_paper(lam, nu)
    if nu == 1.0:
        return 0.0
    vin = v_in(lam)
    hi = 1.0 / lam - 1.0 - BRACKET_GAP

    def excess(b):
        return v_out(lam, b) / vin - nu

    if excess(hi) > 0.0:
        raise DomainError(f"nu = {nu!r} is below the reachable ratio for lambda = {lam!r}", value=nu)
    guess = beta_for_ratio_closed_form(lam, nu)
    if not 0.0 <= guess <= hi:
        raise DomainError(f"closed-form beta {guess!r} falls outside the bracket [0, {hi!r}]", value=guess)
    return float(bisect(excess, 0.0, hi, xtol=BISECT_XTOL, maxiter=400))


def x_for_improvement(query: FeasibilityQuery, variant: Variant = Variant.EXACT) -> float:
    """Outcome whose ``beta`` yields the requested ratio: ``beta/(sqrt2 alpha phi sin theta) + sqrt2 alpha cos theta``."""
    b = beta_for_ratio(query.lam, query.nu, variant)
    s = math.sin(query.theta)
    if s == 0.0:
        raise DomainError("sin(theta) = 0: the outcome cannot steer beta", value=query.theta)
    return b / (SQRT2 * query.alpha * query.phi * s) + center(query.alpha, query.theta)


@dataclass(frozen=True)
class ResourceCondition:
    rhs: float
    satisfied_margin: float


def resource_rhs(lam: float, nu: float, theta: float) -> float:
    """Right-hand side that ``alpha * phi`` must comfortably exceed (published form)."""
    return (lam * lam - 1.0) * (1.0 - nu) / (2.0 * SQRT2 * math.sin(theta) * (lam * (nu - 1.0) - 1.0))


def resource_condition(query: FeasibilityQuery) -> ResourceCondition:
    rhs = resource_rhs(query.lam, query.nu, query.theta)
    ap = query.alpha * query.phi
    margin = math.inf if rhs == 0.0 else ap / rhs
    return ResourceCondition(rhs=rhs, satisfied_margin=margin)


def alpha_for_margin(lam: float, nu: float, phi: float, theta: float = math.pi / 2,
                     margin: float = 1.0) -> float:
    """Coherent amplitude at which ``alpha phi / rhs`` equals ``margin``."""
    return margin * resource_rhs(lam, nu, theta) / phi


def density_at_improvement(query: FeasibilityQuery, variant: Variant = Variant.EXACT) -> float:
    """Linearized density at the outcome that delivers the requested improvement."""
    x = x_for_improvement(query, variant)
    return density_closed_form(query.lam, query.alpha, query.phi, query.theta, x,
                               DensityVariant.LINEAR_BETA)


# -- the published worked example (lambda = 1/2, theta = pi/2, 10 % improvement) --

PAPER_QUOTED_X_COEFF = 0.03
PAPER_QUOTED_PREFACTOR = 0.6
PAPER_QUOTED_EXPONENT = 0.0009


def paper_quoted_x(alpha: float, phi: float) -> float:
    """Quoted outcome ``0.03 / (alpha phi)`` for the worked example."""
    return PAPER_QUOTED_X_COEFF / (alpha * phi)


def paper_quoted_density(alpha: float, phi: float) -> float:
    """Quoted density ``0.6 exp(-0.0009 / (alpha phi)^2)`` for the worked example."""
    return PAPER_QUOTED_PREFACTOR * math.exp(-PAPER_QUOTED_EXPONENT / (alpha * phi) ** 2)
