"""Cartesian parameter sweeps behind the command-line tool.

A sweep is described by a :class:`SweepConfig`: a mode plus named value lists
(axes). Every combination is evaluated independently, optionally in worker
processes, and rows are emitted in input order whatever the completion order.
"""
from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import analysis
from .analysis import FeasibilityQuery, Variant
from .homodyne import (
    SQRT2,
    DensityVariant,
    HomodyneSetting,
    center,
    density_closed_form,
    density_exact,
    sample_from_seeds,
)
from .kerr import apply_cross_kerr
from .pipeline import ProtocolParams, RunRecord, run_protocol
from .rng import child_seed
from .schmidt import DEFAULT_TRUNCATION, Truncation, lambda_from_squeezing_db, tmsv_from_lambda

AXES = ("lambda", "squeezing_db", "alpha", "phi", "theta", "nu", "x", "seed")
MODES = ("run", "sample", "feasibility", "density")
MAX_POINTS = 10**7


class ConfigError(ValueError):
    """The sweep description is malformed (maps to exit status 2)."""


@dataclass
class SweepConfig:
    mode: str = "run"
    axes: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "csv"
    jobs: int = 1
    paper_quoted: bool = False
    fidelity: dict = field(default_factory=lambda: {"exact": True, "exp_beta": True, "linear_beta": True})
    count: int = 1
    points: int = 1601
    halfwidth: float = 8.0
    margin: Optional[float] = None
    n_max: Optional[int] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        unknown = set(self.axes) - set(AXES)
        if unknown:
            raise ConfigError(f"unknown axes: {sorted(unknown)}")
        for name, values in self.axes.items():
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise ConfigError(f"axis {name!r} must be a non-empty list")
        if "lambda" in self.axes and "squeezing_db" in self.axes:
            raise ConfigError("give exactly one of lambda and squeezing_db")
        if "lambda" not in self.axes and "squeezing_db" not in self.axes:
            raise ConfigError("one of lambda or squeezing_db is required")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.jobs < 1 or self.count < 1 or self.points < 2:
            raise ConfigError("jobs, count must be >= 1 and points >= 2")
        if self.size() > MAX_POINTS:
            raise ConfigError(f"sweep has {self.size()} points, above the limit {MAX_POINTS}")
        unknown_fid = set(self.fidelity) - {"exact", "exp_beta", "linear_beta"}
        if unknown_fid:
            raise ConfigError(f"unknown fidelity flags: {sorted(unknown_fid)}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        data = dict(data)
        if "fidelity" in data:
            fid = {"exact": True, "exp_beta": True, "linear_beta": True}
            fid.update(data["fidelity"])
            data["fidelity"] = fid
        return cls(**data)

    @classmethod
    def load(cls, path: str) -> "SweepConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(data)

    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())

    def grid(self) -> list[dict]:
        names = [a for a in AXES if a in self.axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axes[a] for a in names))]

    @property
    def truncation(self) -> Truncation:
        return DEFAULT_TRUNCATION if self.n_max is None else Truncation(n_max=self.n_max)


def _lam(point: dict) -> float:
    if "lambda" in point:
        return float(point["lambda"])
    return lambda_from_squeezing_db(float(point["squeezing_db"]))


def _theta(point: dict) -> float:
    return float(point.get("theta", math.pi / 2))


def _need(point: dict, *names):
    missing = [n for n in names if n not in point]
    if missing:
        raise ConfigError(f"missing required axis value(s): {', '.join(missing)}")


# -- per-mode columns and row builders ----------------------------------------

def columns(cfg: SweepConfig) -> list[str]:
    if cfg.mode in ("run", "sample"):
        return RunRecord.columns()
    if cfg.mode == "density":
        cols = ["lambda", "alpha", "phi", "theta", "x"]
        cols += [f"density_{k}" for k in ("exact", "exp_beta", "linear_beta") if cfg.fidelity.get(k)]
        if cfg.paper_quoted:
            cols += ["paper_quoted_x", "paper_quoted_density"]
        return cols
    cols = [
        "lambda", "nu", "alpha", "phi", "theta", "improvement",
        "beta_paper_formula", "beta_exact",
        "x_paper_formula", "x_exact", "x_coeff_paper_formula", "x_coeff_exact",
        "resource_rhs_paper_formula", "margin", "alpha_for_unit_margin",
        "density_at_x_paper_formula", "density_at_x_exact", "ps", "ps_exact",
    ]
    if cfg.paper_quoted:
        cols += ["paper_quoted_x", "paper_quoted_x_coeff", "paper_quoted_density"]
    return cols


def _run_rows(point: dict, cfg: SweepConfig) -> list[dict]:
    _need(point, "alpha", "phi")
    params = ProtocolParams(_lam(point), float(point["alpha"]), float(point["phi"]), _theta(point),
                            cfg.truncation)
    x = point.get("x")
    seed = point.get("seed")
    if x is None and seed is None:
        raise ConfigError("run needs an x value or a seed")
    rec = run_protocol(params, x=None if x is None else float(x),
                       seed=None if seed is None else int(seed))
    return [rec.as_row()]


def _sample_rows(point: dict, cfg: SweepConfig) -> list[dict]:
    _need(point, "alpha", "phi", "seed")
    params = ProtocolParams(_lam(point), float(point["alpha"]), float(point["phi"]), _theta(point),
                            cfg.truncation)
    hybrid = apply_cross_kerr(tmsv_from_lambda(params.lam, params.truncation), params.alpha, params.phi)
    seeds = [child_seed(int(point["seed"]), i) for i in range(cfg.count)]
    xs = sample_from_seeds(hybrid, HomodyneSetting(params.theta), seeds)
    rows = []
    ps = None
    for i, (s, x) in enumerate(zip(seeds, xs)):
        rec = run_protocol(params, x=float(x), with_ps=(i == 0))
        if i == 0:
            ps = rec.ps
        rec.ps = ps
        rec.seed = s
        rows.append(rec.as_row())
    return rows


def _closed_form_column(lam, alpha, phi, theta, x, variant):
    u = x - center(alpha, theta)
    b = SQRT2 * alpha * phi * math.sin(theta) * u
    factor = np.exp(b) if variant is DensityVariant.EXP_BETA else 1.0 + b
    ok = np.abs(factor * lam) < 1.0
    out = np.full(x.shape, math.nan)
    if np.any(ok):
        out[ok] = density_closed_form(lam, alpha, phi, theta, x[ok], variant)
    return out


def _density_rows(point: dict, cfg: SweepConfig) -> list[dict]:
    _need(point, "alpha", "phi")
    lam, alpha, phi, theta = _lam(point), float(point["alpha"]), float(point["phi"]), _theta(point)
    c = center(alpha, theta)
    if "x" in point:
        xs = np.array([float(point["x"])])
    else:
        xs = c + np.linspace(-cfg.halfwidth, cfg.halfwidth, cfg.points)
    cols = {}
    if cfg.fidelity.get("exact"):
        hybrid = apply_cross_kerr(tmsv_from_lambda(lam, cfg.truncation), alpha, phi)
        cols["density_exact"] = np.atleast_1d(density_exact(hybrid, theta, xs))
    if cfg.fidelity.get("exp_beta"):
        cols["density_exp_beta"] = _closed_form_column(lam, alpha, phi, theta, xs, DensityVariant.EXP_BETA)
    if cfg.fidelity.get("linear_beta"):
        cols["density_linear_beta"] = _closed_form_column(lam, alpha, phi, theta, xs, DensityVariant.LINEAR_BETA)
    extra = {}
    if cfg.paper_quoted:
        extra = {"paper_quoted_x": analysis.paper_quoted_x(alpha, phi),
                 "paper_quoted_density": analysis.paper_quoted_density(alpha, phi)}
    rows = []
    for i, x in enumerate(xs):
        row = {"lambda": lam, "alpha": alpha, "phi": phi, "theta": theta, "x": float(x)}
        row.update({k: float(v[i]) for k, v in cols.items()})
        row.update(extra)
        rows.append(row)
    return rows


def _feasibility_rows(point: dict, cfg: SweepConfig) -> list[dict]:
    _need(point, "nu", "phi")
    lam, nu, phi, theta = _lam(point), float(point["nu"]), float(point["phi"]), _theta(point)
    unit_alpha = analysis.alpha_for_margin(lam, nu, phi, theta, 1.0)
    if "alpha" in point:
        alpha = float(point["alpha"])
    elif unit_alpha > 0.0:
        alpha = analysis.alpha_for_margin(lam, nu, phi, theta, cfg.margin or 1.0)
    else:
        raise ConfigError(f"nu={nu!r} needs no resources, so alpha cannot be derived; pass --alpha")
    query = FeasibilityQuery(lam, nu, alpha, phi, theta)
    c = center(alpha, theta)
    ap = alpha * phi
    x_paper = analysis.x_for_improvement(query, Variant.PAPER)
    x_exact = analysis.x_for_improvement(query, Variant.EXACT)
    rc = analysis.resource_condition(query)
    bounds = analysis.success_probability(lam, alpha, phi, theta, truncation=cfg.truncation)
    row = {
        "lambda": lam, "nu": nu, "alpha": alpha, "phi": phi, "theta": theta,
        "improvement": 1.0 - nu,
        "beta_paper_formula": analysis.beta_for_ratio(lam, nu, Variant.PAPER),
        "beta_exact": analysis.beta_for_ratio(lam, nu, Variant.EXACT),
        "x_paper_formula": x_paper,
        "x_exact": x_exact,
        "x_coeff_paper_formula": (x_paper - c) * ap,
        "x_coeff_exact": (x_exact - c) * ap,
        "resource_rhs_paper_formula": rc.rhs,
        "margin": rc.satisfied_margin,
        "alpha_for_unit_margin": unit_alpha,
        "density_at_x_paper_formula": analysis.density_at_improvement(query, Variant.PAPER),
        "density_at_x_exact": analysis.density_at_improvement(query, Variant.EXACT),
        "ps": bounds.ps,
        "ps_exact": bounds.ps_exact,
    }
    if cfg.paper_quoted:
        row["paper_quoted_x"] = analysis.paper_quoted_x(alpha, phi)
        row["paper_quoted_x_coeff"] = analysis.PAPER_QUOTED_X_COEFF
        row["paper_quoted_density"] = analysis.paper_quoted_density(alpha, phi)
    return [row]


_HANDLERS = {
    "run": _run_rows,
    "sample": _sample_rows,
    "density": _density_rows,
    "feasibility": _feasibility_rows,
}


def evaluate_point(cfg: SweepConfig, point: dict) -> list[dict]:
    return _HANDLERS[cfg.mode](point, cfg)


def _worker(args):
    cfg, point = args
    return evaluate_point(cfg, point)


def run_sweep(cfg: SweepConfig) -> list[dict]:
    """Evaluate every grid point; rows come back in input order."""
    points = cfg.grid()
    if cfg.jobs == 1 or len(points) == 1:
        chunks = [evaluate_point(cfg, p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_worker, [(cfg, p) for p in points],
                                   chunksize=max(1, len(points) // (4 * cfg.jobs))))
    return [row for chunk in chunks for row in chunk]

