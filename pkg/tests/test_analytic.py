import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdcopt.analytic import (
    RATIO_LOWER,
    RATIO_UPPER,
    PumpRegime,
    case_boundaries,
    classify_pump_regime,
    optimal_pump_fixed_crystal,
    symmetric_full_optimum,
    tau_a_low,
    tau_ah_limit_infinity,
    tau_ah_limit_zero,
    tau_ah_low_sym,
)
from spdcopt.exceptions import DomainError
from spdcopt.numeric import dense_scan_argmin
from spdcopt.temporal import tau_a, tau_ah
from spdcopt.verification import classify_by_scan

D1KM = -1.15e-23
logu = lambda lo, hi: st.floats(lo, hi).map(lambda e: 10.0**e)  # noqa: E731
disps = logu(-26, -20).map(lambda d: -d)
sigmas = logu(9, 14)


def test_symmetric_optimum_closed_form():
    opt = symmetric_full_optimum(D1KM)
    assert opt.tau_p == pytest.approx(4.796e-12, rel=1e-3)
    assert opt.sigma == pytest.approx(4.170e11, rel=1e-3)
    assert opt.tau_ah == pytest.approx(opt.tau_p)
    assert float(tau_ah(opt.tau_p, opt.sigma, D1KM, D1KM)) == pytest.approx(opt.tau_ah, rel=1e-12)


def test_tau_a_low_is_scan_minimum():
    sg = 3e11
    tp, val = tau_a_low(D1KM, sg)
    x, f = dense_scan_argmin(lambda t: tau_a(t, sg, D1KM), 1e-13, 1e-10, 200_001)
    assert tp == pytest.approx(x, rel=1e-3)
    assert val == pytest.approx(f, rel=1e-9)


def test_tau_ah_low_sym_matches_stationary_point():
    sg = 1e12
    opt = optimal_pump_fixed_crystal(D1KM, D1KM, sg)
    assert opt.has_minimum
    assert opt.tau_ah_at_optimum == pytest.approx(tau_ah_low_sym(D1KM, sg), rel=1e-12)


def test_limits_match_extreme_pumps():
    d_a, d_b, sg = D1KM, 100 * D1KM, 1e11
    assert float(tau_ah(1e-22, sg, d_a, d_b)) == pytest.approx(tau_ah_limit_zero(d_a, d_b, sg), rel=1e-9)
    assert float(tau_ah(1e3, sg, d_a, d_b)) == pytest.approx(tau_ah_limit_infinity(d_a, d_b, sg), rel=1e-9)


def test_strongly_asymmetric_case_has_no_minimum():
    opt = optimal_pump_fixed_crystal(D1KM, 100 * D1KM, 1e11)
    assert opt.kind is PumpRegime.INFIMUM_AT_ZERO
    assert opt.tau_p_star is None and not opt.has_minimum
    assert classify_by_scan(D1KM, 100 * D1KM, 1e11) is PumpRegime.INFIMUM_AT_ZERO


def test_ratio_thresholds_bracket_always_interior():
    assert RATIO_LOWER * RATIO_UPPER == pytest.approx(1.0 / 7.0 * (32 - 25))
    for ratio in (0.1, 1.0, 5.0, 10.0):
        for sg in (1e9, 1e11, 1e13):
            assert classify_pump_regime(D1KM, ratio * D1KM, sg) is PumpRegime.INTERIOR_MINIMUM


def test_boundaries_real_outside_band():
    b = case_boundaries(D1KM, 100 * D1KM)
    assert b.xi_plus_minus is not None and b.xi_plus_plus is not None
    assert b.xi_plus_minus < b.xi_plus_plus


@pytest.mark.parametrize("args", [(0.0, D1KM, 1e11), (1e-23, D1KM, 1e11), (D1KM, D1KM, 0.0)])
def test_classify_rejects_bad_input(args):
    with pytest.raises(DomainError):
        classify_pump_regime(*args)


@settings(max_examples=150, deadline=None)
@given(disps, disps, sigmas)
def test_classification_agrees_with_scan(d_a, d_b, sg):
    assert classify_pump_regime(d_a, d_b, sg) is classify_by_scan(d_a, d_b, sg)


@settings(max_examples=150, deadline=None)
@given(disps, disps, sigmas)
def test_interior_optimum_beats_neighbours(d_a, d_b, sg):
    opt = optimal_pump_fixed_crystal(d_a, d_b, sg)
    if not opt.has_minimum:
        return
    for f in (0.9, 1.1):
        assert opt.tau_ah_at_optimum <= float(tau_ah(opt.tau_p_star * f, sg, d_a, d_b)) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(disps)
def test_symmetric_optimum_beats_grid(d):
    opt = symmetric_full_optimum(d)
    tp = opt.tau_p * np.geomspace(0.5, 2, 9)
    sg = opt.sigma * np.geomspace(0.5, 2, 9)
    grid = tau_ah(tp[:, None], sg[None, :], d, d)
    assert opt.tau_ah <= grid.min() * (1 + 1e-12)
    assert math.isfinite(opt.tau_ah)


def test_tau_ah_low_sym_at_global_optimum():
    opt = symmetric_full_optimum(D1KM)
    assert tau_ah_low_sym(D1KM, opt.sigma) == pytest.approx(opt.tau_ah, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(disps, sigmas)
def test_tau_ah_low_sym_is_grid_minimum(d, sg):
    grid = tau_ah(np.geomspace(1e-16, 1e-6, 2001), sg, d, d)
    assert tau_ah_low_sym(d, sg) <= grid.min() * (1 + 1e-12)
