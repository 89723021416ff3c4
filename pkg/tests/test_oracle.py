import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdcopt.exceptions import DomainError, GridError
from spdcopt.oracle import (
    GridSpec,
    empirical_widths,
    joint_temporal_intensity,
    jittered_widths,
    oracle_widths,
    synthetic_joint_intensity,
)
from spdcopt.temporal import SourceParams, jitter_weight, tau_a, tau_ah, tau_ah_jittered
from spdcopt.verification import oracle_suite

logu = lambda lo, hi: st.floats(lo, hi).map(lambda e: 10.0**e)  # noqa: E731


def exact_jittered_heralded(tp, sg, da, db, ja, jb):
    # Gaussian conditioning with jitter on both arrival times
    vb = float(tau_a(tp, sg, db)) ** 2
    x = float(jitter_weight(tp, sg, da, db))
    return math.sqrt(float(tau_ah(tp, sg, da, db)) ** 2 + ja**2 + x * jb**2 * vb / (vb + jb**2))


def test_synthetic_gaussian_recovered():
    ji = synthetic_joint_intensity(2e-12, 3e-12, rho=0.6)
    w = empirical_widths(ji)
    # the amplitude is Gaussian with these intensity moments
    assert w.tau_a == pytest.approx(2e-12, rel=1e-9)
    assert w.tau_ah == pytest.approx(2e-12 * math.sqrt(1 - 0.36), rel=1e-9)


@pytest.mark.parametrize(
    "tp, sg, la, lb",
    [(1e-12, 1e12, 1e3, 1e3), (1e-9, 1e12, 1e3, 1e3), (2e-13, 1e13, 10.0, 5e4), (1e-10, 1e10, 1e5, 1.0)],
)
def test_widths_match_closed_form(tp, sg, la, lb):
    da, db = -1.15e-26 * la, -1.15e-26 * lb
    w = oracle_widths(SourceParams(tp, sg), da, db)
    assert w.tau_a == pytest.approx(float(tau_a(tp, sg, da)), rel=1e-6)
    assert w.tau_ah == pytest.approx(float(tau_ah(tp, sg, da, db)), rel=1e-6)
    assert w.slice_spread < 1e-6


def test_suite_detects_perturbation():
    assert oracle_suite(n=5, seed=3).passed
    assert not oracle_suite(n=5, seed=3, perturb=0.01).passed


def test_too_coarse_grid_is_reported():
    with pytest.raises(GridError, match="alias"):
        joint_temporal_intensity(SourceParams(1e-12, 1e12), -1e-23, -1e-23, GridSpec(n_points=128))


def test_gridspec_validation():
    with pytest.raises(DomainError):
        GridSpec(n_points=1000)
    with pytest.raises(DomainError):
        GridSpec(span_factor=4.0)


def test_resolution_independent():
    src, da, db = SourceParams(3e-12, 5e11), -2e-23, -7e-24
    a = oracle_widths(src, da, db)
    b = oracle_widths(src, da, db, GridSpec(n_output=512, oversample=2.0))
    assert a.tau_ah == pytest.approx(b.tau_ah, rel=1e-12)


def test_jitter_convolution_matches_exact_conditioning():
    tp, sg, da, db, ja, jb = 1e-12, 1e12, -1.15e-23, -1.15e-23, 3e-12, 4e-12
    ji = joint_temporal_intensity(SourceParams(tp, sg), da, db)
    ta, tah = jittered_widths(ji, ja, jb)
    assert ta == pytest.approx(math.hypot(float(tau_a(tp, sg, da)), ja), rel=1e-9)
    assert tah == pytest.approx(exact_jittered_heralded(tp, sg, da, db, ja, jb), rel=1e-9)


def test_closed_form_jitter_is_leading_order():
    # small heralding jitter relative to the heralding photon width: agreement
    tp, sg, da, db = 1e-10, 1e11, -1.15e-21, -1.15e-21
    ji = joint_temporal_intensity(SourceParams(tp, sg), da, db)
    jb = 0.05 * float(tau_a(tp, sg, db))
    _, tah = jittered_widths(ji, 1e-12, jb)
    assert tah == pytest.approx(float(tau_ah_jittered(tp, sg, da, db, 1e-12, jb)), rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(logu(-13, -9), logu(10, 13), logu(0, 5), logu(0, 5))
def test_dispersion_sign_flip_invariant(tp, sg, la, lb):
    src, da, db = SourceParams(tp, sg), -1.15e-26 * la, -1.15e-26 * lb
    a, b = oracle_widths(src, da, db), oracle_widths(src, -da, -db)
    assert a.tau_a == pytest.approx(b.tau_a, rel=1e-9)
    assert a.tau_ah == pytest.approx(b.tau_ah, rel=1e-9)


def test_intensity_normalised():
    ji = joint_temporal_intensity(SourceParams(1e-11, 1e12), -1e-23, -3e-23)
    assert ji.intensity.sum() == pytest.approx(1.0)
    mean, cov = ji.stats()
    assert np.allclose(mean, 0.0, atol=1e-15)
    assert cov[0, 0] == pytest.approx(float(tau_a(1e-11, 1e12, -1e-23)) ** 2, rel=1e-6)
