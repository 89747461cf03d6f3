import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from procrustean import analysis
from procrustean.analysis import FeasibilityQuery, Variant
from procrustean.errors import DomainError
from procrustean.homodyne import beta
from procrustean.kerr import apply_cross_kerr
from procrustean.oracles import exact_window_mass
from procrustean.pipeline import ProtocolParams, StageError, run_protocol
from procrustean.quadrature import composite_gauss_legendre, integrate
from procrustean.schmidt import tmsv_from_lambda

HALF_PI = math.pi / 2


def test_v_in_examples():
    assert analysis.v_in(0.5) == pytest.approx(2 / 3, abs=1e-15)
    assert analysis.v_in(0.0) == 2.0


def test_v_out():
    assert analysis.v_out(0.5, 0.0) == analysis.v_in(0.5)
    assert analysis.v_out(0.5, 0.1) == pytest.approx(2 * 0.45 / 1.55)
    with pytest.raises(DomainError):
        analysis.v_out(0.5, 1.0)


@given(st.floats(0.01, 0.95), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_v_out_decreasing_in_beta(lam, b1, b2):
    lo, hi = sorted((b1, b2))
    top = 1 / lam - 1
    lo, hi = lo * top * 0.99, hi * top * 0.99
    if hi - lo > 1e-9:
        assert analysis.v_out(lam, hi) < analysis.v_out(lam, lo)


def test_success_criterion():
    assert analysis.success_criterion(0.1, 1.0, HALF_PI)
    assert not analysis.success_criterion(-0.1, 1.0, HALF_PI)
    c = math.sqrt(2) * math.cos(HALF_PI)
    assert not analysis.success_criterion(c, 1.0, HALF_PI)
    assert analysis.success_criterion(-0.1, 1.0, HALF_PI, phi=-0.01)


def test_success_criterion_matches_lambda_growth():
    for x in np.linspace(-3, 3, 61):
        b = float(beta(x, 2.0, 0.01, 1.1))
        assert analysis.success_criterion(x, 2.0, 1.1) == ((1 + b) * 0.5 > 0.5)


def test_x_limit_example():
    assert analysis.x_limit(0.5, 1.0, 0.1, HALF_PI) == pytest.approx(5 * math.sqrt(2), rel=1e-12)
    with pytest.raises(DomainError):
        analysis.x_limit(0.5, 1.0, -0.1, HALF_PI)


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
def test_beta_at_x_limit(lam):
    xl = analysis.x_limit(lam, 2.0, 0.05, 1.0)
    assert float(beta(xl, 2.0, 0.05, 1.0)) == pytest.approx(1 / lam - 1, rel=1e-10)
    if lam == 0.5:
        assert float(beta(xl, 2.0, 0.05, 1.0)) == pytest.approx(1.0, rel=1e-10)


def test_success_probability_fig2():
    sb = analysis.success_probability(0.5, 1e4, 1e-10, HALF_PI)
    assert 0.49 <= sb.ps <= 0.51
    assert sb.converged and not sb.mirrored and not sb.singular_endpoint


def test_success_probability_vacuum_is_half():
    assert analysis.success_probability(0.0, 2.0, 0.01, HALF_PI).ps == pytest.approx(0.5, abs=1e-12)


def test_success_probability_mirrored():
    a = analysis.success_probability(0.5, 1.5, 1e-2, HALF_PI)
    b = analysis.success_probability(0.5, 1.5, -1e-2, HALF_PI)
    assert b.mirrored
    assert b.ps == pytest.approx(a.ps, abs=1e-12)


def test_success_probability_zero_phase_rejected():
    with pytest.raises(DomainError):
        analysis.success_probability(0.5, 1.0, 0.0, HALF_PI)


def test_ps_exact_against_erf_oracle():
    lam, alpha, phi = 0.5, 1.5, 1e-2
    sb = analysis.success_probability(lam, alpha, phi, HALF_PI)
    hybrid = apply_cross_kerr(tmsv_from_lambda(lam), alpha, phi)
    oracle = exact_window_mass(hybrid, HALF_PI, sb.x_min, sb.x_limit)
    assert abs(sb.ps_exact - oracle) < 1e-9


def test_panel_halving_stable():
    lam, alpha, phi = 0.5, 1e4, 1e-10
    k = math.sqrt(2) * alpha * phi
    top = min((1 - lam) / (lam * k) * (1 - 1e-9), analysis.GAUSS_CUT)

    def f(v):
        return np.exp(-v * v) * (1 - lam**2) / (math.sqrt(math.pi) * (1 - ((1 + k * v) * lam) ** 2))

    res = integrate(f, 0.0, top)
    assert res.converged
    assert abs(composite_gauss_legendre(f, 0.0, top, 2 * res.panels) - res.value) < 1e-9


def test_quadrature_polynomial_exact():
    assert composite_gauss_legendre(lambda x: x**5 - 3 * x, 0.0, 2.0, 1) == pytest.approx(64 / 6 - 6, abs=1e-13)


def test_beta_for_ratio_example():
    assert analysis.beta_for_ratio(0.5, 0.9, Variant.PAPER) == pytest.approx(0.0714286, abs=1e-6)
    assert analysis.beta_for_ratio(0.5, 0.9, Variant.EXACT) == pytest.approx(0.0769231, abs=1e-6)
    assert analysis.beta_for_ratio(0.5, 1.0) == 0.0
    with pytest.raises(DomainError):
        analysis.beta_for_ratio(0.5, 1.1)


@pytest.mark.parametrize("lam", np.round(np.arange(0.1, 0.91, 0.1), 2))
@pytest.mark.parametrize("nu", [0.5, 0.7, 0.9, 0.99])
def test_exact_root_reproduces_ratio(lam, nu):
    b = analysis.beta_for_ratio(lam, nu, Variant.EXACT)
    assert abs(analysis.v_out(lam, b) / analysis.v_in(lam) - nu) < 1e-10
    assert b == pytest.approx(analysis.beta_for_ratio_closed_form(lam, nu), abs=1e-10)


def test_resource_condition():
    q = FeasibilityQuery(0.5, 0.9, 3e7, 1e-9)
    rc = analysis.resource_condition(q)
    assert rc.rhs == pytest.approx(0.0252538, abs=1e-7)
    assert rc.satisfied_margin == pytest.approx(1.19, abs=0.01)
    rc = analysis.resource_condition(FeasibilityQuery(0.5, 0.9, 1.5e3, 1e-5))
    assert rc.satisfied_margin == pytest.approx(0.594, abs=0.001)
    for phi, want in ((1e-9, 2.525e7), (1e-5, 2.525e3), (1e-2, 2.525)):
        assert analysis.alpha_for_margin(0.5, 0.9, phi) == pytest.approx(want, rel=1e-3)


def test_x_for_improvement():
    q = FeasibilityQuery(0.5, 0.9, 3e7, 1e-9)
    assert analysis.x_for_improvement(q, Variant.PAPER) * 3e7 * 1e-9 == pytest.approx(0.0505076, abs=1e-6)
    assert analysis.x_for_improvement(q, Variant.EXACT) * 3e7 * 1e-9 == pytest.approx(0.0543928, abs=1e-6)
    assert analysis.density_at_improvement(q) > 0


def test_paper_quoted_values():
    assert analysis.paper_quoted_x(3e7, 1e-9) == pytest.approx(1.0)
    assert analysis.paper_quoted_density(3e7, 1e-9) == pytest.approx(0.6 * math.exp(-1.0))


def test_feasibility_query_validation():
    with pytest.raises(DomainError):
        FeasibilityQuery(0.5, 0.9, 1.0, 0.0)
    with pytest.raises(DomainError):
        FeasibilityQuery(1.0, 0.9, 1.0, 0.1)


def test_run_protocol_fig2():
    rec = run_protocol(ProtocolParams(0.5, 1e4, 1e-10), x=1.0)
    assert rec.success
    assert abs(rec.lambda_prime_exact_fit - rec.lambda_prime_exp) < 1e-6
    assert rec.v_out_exact < rec.v_in
    assert abs(rec.v_out_exact - rec.v_out_linear) / rec.v_in < 1e-4
    assert rec.entropy_out_exact > rec.entropy_in
    assert list(rec.as_row()) == rec.columns()


def test_run_protocol_failure_branch():
    rec = run_protocol(ProtocolParams(0.5, 1e4, 1e-10), x=-1.0)
    assert not rec.success and rec.v_out_exact > rec.v_in


def test_run_protocol_seeded_reproducible():
    p = ProtocolParams.from_inputs(1.5, 1e-2, squeezing_db=4.0)
    assert run_protocol(p, seed=9).as_row() == run_protocol(p, seed=9).as_row()


def test_run_protocol_stage_errors():
    with pytest.raises(StageError) as info:
        run_protocol(ProtocolParams(0.5, 1.0, 1.0), x=5.0)
    assert info.value.stage in {"homodyne", "analysis"}
    with pytest.raises(StageError) as info:
        run_protocol(ProtocolParams(1.5, 1.0, 1.0), x=0.0)
    assert info.value.stage == "tmsv"
