"""End-to-end protocol run: squeezed vacuum -> Kerr -> homodyne -> feed-forward -> measures."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

from . import analysis
from .errors import DomainError, ProcrusteanError
from .feedforward import apply_feedforward
from .homodyne import HomodyneSetting, project, sample_outcome
from .kerr import apply_cross_kerr
from .schmidt import (
    DEFAULT_TRUNCATION,
    Truncation,
    duan_variance_sum,
    effective_lambda,
    entropy_of_entanglement,
    lambda_from_squeezing_db,
    squeezing_db_from_lambda,
    tmsv_from_lambda,
)


class StageError(ProcrusteanError):
    """A module error annotated with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ProtocolParams:
    lam: float
    alpha: float
    phi: float
    theta: float = math.pi / 2
    truncation: Truncation = DEFAULT_TRUNCATION

    @classmethod
    def from_inputs(cls, alpha, phi, theta=math.pi / 2, lam=None, squeezing_db=None,
                    truncation=DEFAULT_TRUNCATION):
        if (lam is None) == (squeezing_db is None):
            raise DomainError("give exactly one of lambda and squeezing_db")
        if lam is None:
            lam = lambda_from_squeezing_db(squeezing_db)
        return cls(float(lam), float(alpha), float(phi), float(theta), truncation)


@dataclass
class RunRecord:
    """One protocol execution; field order is the CSV column order."""

    # the header must read "lambda"; the attribute cannot
    lambda_: float
    squeezing_db: float
    alpha: float
    phi: float
    theta: float
    x: float
    seed: Optional[int]
    beta: float
    gamma: float
    lambda_prime_linear: float
    lambda_prime_exp: float
    lambda_prime_exact_fit: float
    v_in: float
    v_out_linear: float
    v_out_exact: float
    entropy_in: float
    entropy_out_exact: float
    density_at_x: float
    success: bool
    ps: Optional[float]
    residual_max_phase: float

    @staticmethod
    def columns() -> list[str]:
        return [_column(f.name) for f in fields(RunRecord)]

    def as_row(self) -> dict:
        return {_column(k): v for k, v in asdict(self).items()}


def _column(name: str) -> str:
    return "lambda" if name == "lambda_" else name


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ProcrusteanError as exc:
        raise StageError(name, exc) from exc


def run_protocol(params: ProtocolParams, x: Optional[float] = None, seed: Optional[int] = None,
                 setting: Optional[HomodyneSetting] = None, with_ps: bool = True) -> RunRecord:
    """Execute the protocol at outcome ``x`` (or at a seeded sampled outcome)."""
    lam, alpha, phi, theta = params.lam, params.alpha, params.phi, params.theta
    source = _stage("tmsv", tmsv_from_lambda, lam, params.truncation)
    hybrid = _stage("kerr", apply_cross_kerr, source, alpha, phi)
    if x is None:
        if seed is None:
            raise StageError("homodyne", DomainError("need an outcome x or a seed to sample one"))
        setting = setting or HomodyneSetting(theta)
        x = _stage("homodyne", sample_outcome, hybrid, setting, seed).x_theta
    state, outcome = _stage("homodyne", project, hybrid, theta, x)
    output, record = _stage("feedforward", apply_feedforward, state, outcome)

    b = outcome.beta
    lam_lin = (1.0 + b) * lam
    v_out_linear = _stage("analysis", analysis.v_out, lam, b)
    if lam == 0.0:
        lam_fit = 0.0
    else:
        lam_fit = _stage("analysis", effective_lambda, output)

    ps = None
    if with_ps and alpha > 0.0 and phi * math.sin(theta) != 0.0:
        ps = _stage("analysis", analysis.success_probability, lam, alpha, phi, theta,
                    truncation=params.truncation).ps

    return RunRecord(
        lambda_=lam,
        squeezing_db=squeezing_db_from_lambda(lam),
        alpha=alpha,
        phi=phi,
        theta=theta,
        x=float(x),
        seed=seed,
        beta=b,
        gamma=outcome.gamma,
        lambda_prime_linear=lam_lin,
        lambda_prime_exp=lam * math.exp(b),
        lambda_prime_exact_fit=lam_fit,
        v_in=analysis.v_in(lam),
        v_out_linear=v_out_linear,
        v_out_exact=duan_variance_sum(output),
        entropy_in=entropy_of_entanglement(source),
        entropy_out_exact=entropy_of_entanglement(output),
        density_at_x=outcome.density,
        success=analysis.success_criterion(x, alpha, theta, phi),
        ps=ps,
        residual_max_phase=record.residual_max_phase,
    )

