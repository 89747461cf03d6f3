import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from procrustean.errors import DomainError
from procrustean.kerr import apply_cross_kerr
from procrustean.schmidt import tmsv_from_lambda

TMSV = tmsv_from_lambda(0.5)


def test_zero_phase_labels_all_alpha():
    h = apply_cross_kerr(TMSV, 2.0, 0.0)
    assert np.all(h.labels() == 2.0)


def test_vacuum_ancilla():
    h = apply_cross_kerr(TMSV, 0.0, 0.3)
    assert np.all(h.labels() == 0.0)


def test_label_value():
    h = apply_cross_kerr(TMSV, 1.0, 0.1)
    assert h.label(3) == pytest.approx(complex(0.955336489125606, 0.29552020666134))
    assert h.label(0) == 1.0


def test_negative_alpha_rejected():
    with pytest.raises(DomainError):
        apply_cross_kerr(TMSV, -1.0, 0.1)


def test_schmidt_amplitudes_untouched():
    h = apply_cross_kerr(TMSV, 3.0, 0.2)
    assert h.schmidt is TMSV
    assert abs(h.schmidt.norm2 - TMSV.norm2) < 1e-15


@given(st.floats(0, 1e3), st.floats(-1, 1), st.floats(-1, 1))
def test_labels_on_circle_and_phases_add(alpha, phi1, phi2):
    h = apply_cross_kerr(TMSV, alpha, phi1)
    np.testing.assert_allclose(np.abs(h.labels()), alpha, rtol=1e-12, atol=1e-300)
    composed = h.relabel(phi2).labels()
    direct = apply_cross_kerr(TMSV, alpha, phi1 + phi2).labels()
    np.testing.assert_allclose(composed, direct, rtol=1e-12, atol=1e-9 * max(alpha, 1.0))


def test_label_matches_polar():
    h = apply_cross_kerr(TMSV, 1.7, -0.05)
    for n in range(5):
        assert h.label(n) == pytest.approx(cmath.rect(1.7, -0.05 * n))
