import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdcopt.exceptions import DomainError
from spdcopt.temporal import (
    BETA_SMF,
    ChannelParams,
    SourceParams,
    bandwidth_to_sigma,
    jitter_weight,
    sigma_to_bandwidth,
    tau_a,
    tau_a_jittered,
    tau_ah,
    tau_ah_jittered,
    temporal_widths,
)

logu = lambda lo, hi: st.floats(lo, hi).map(lambda e: 10.0**e)  # noqa: E731
tau_ps = logu(-14, -8)
sigmas = logu(9, 14)
disps = logu(-27, -19).map(lambda d: -d)

# frozen from the numerical transform in spdcopt.oracle (agreement ~1e-15)
ORACLE_POINTS = [
    (1e-12, 1e12, -1.15e-23, -1.15e-23, 1.290590949914031e-11, 1.041088332262077e-11),
    (5e-11, 3e11, -2.3e-22, -5.75e-24, 4.298280017764212e-11, 3.6204785517309066e-11),
    (1e-9, 1e12, -1.15e-23, -1.15e-23, 5.00034061472066e-10, 1.167182241410992e-11),
]


@pytest.mark.parametrize("tp, sg, da, db, ta, tah", ORACLE_POINTS)
def test_widths_match_frozen_oracle(tp, sg, da, db, ta, tah):
    assert float(tau_a(tp, sg, da)) == pytest.approx(ta, rel=1e-12)
    assert float(tau_ah(tp, sg, da, db)) == pytest.approx(tah, rel=1e-12)


def test_zero_dispersion_limits():
    tp, sg = 2e-12, 1e12
    assert float(tau_a(tp, sg, 0.0)) == pytest.approx(math.hypot(tp / 2, 1 / sg))
    assert float(tau_ah(tp, sg, 0.0, 0.0)) == pytest.approx(2 * tp / math.hypot(sg * tp, 2.0))


def test_channel_dispersion():
    assert ChannelParams(1e3).dispersion == pytest.approx(BETA_SMF * 1e3)


def test_bandwidth_roundtrip():
    bw = sigma_to_bandwidth(1e11, 1550e-9)
    assert bandwidth_to_sigma(bw, 1550e-9) == pytest.approx(1e11)


def test_vectorised():
    tp = np.array([1e-12, 1e-11])
    out = tau_ah(tp, 1e12, -1e-23, -1e-23)
    assert out.shape == (2,)


def test_temporal_widths_bundle():
    w = temporal_widths(SourceParams(1e-12, 1e12), -1e-23, -2e-23)
    assert w.tau_heralded <= w.tau_unheralded


@pytest.mark.parametrize("args", [(0.0, 1e12, -1e-23), (1e-12, -1.0, -1e-23), (math.nan, 1e12, 0.0)])
def test_invalid_source(args):
    with pytest.raises(DomainError):
        tau_a(*args)


def test_negative_jitter_rejected():
    with pytest.raises(DomainError):
        tau_a_jittered(1e-12, 1e12, -1e-23, -1e-12)


def test_jitter_weight_zeros():
    # binary-exact inputs so that both conditions hold without rounding
    d_a, d_b, sg = -(2.0**-80), -(2.0**-76), 2.0**40
    assert jitter_weight(2.0 / sg, sg, d_a, d_b) == 0.0
    assert jitter_weight(math.sqrt(d_a * d_b) * sg, sg, d_a, d_b) == 0.0
    assert jitter_weight(3.0 / sg, sg, d_a, d_b) > 0.0


@settings(max_examples=200, deadline=None)
@given(sigmas, disps, disps)
def test_jitter_weight_vanishes_on_both_curves(sg, da, db):
    assert jitter_weight(2.0 / sg, sg, da, db) < 1e-12
    assert jitter_weight(math.sqrt(da * db) * sg, sg, da, db) < 1e-12


@settings(max_examples=300, deadline=None)
@given(tau_ps, sigmas, disps, disps)
def test_arm_swap_identity(tp, sg, da, db):
    lhs = tau_a(tp, sg, da) * tau_ah(tp, sg, db, da)
    rhs = tau_a(tp, sg, db) * tau_ah(tp, sg, da, db)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(tau_ps, sigmas, disps, disps)
def test_jitter_weight_nonnegative(tp, sg, da, db):
    assert jitter_weight(tp, sg, da, db) >= 0.0


@settings(max_examples=300, deadline=None)
@given(tau_ps, sigmas, disps, disps)
def test_dispersion_only_broadens(tp, sg, da, db):
    assert tau_a(tp, sg, da) >= tau_a(tp, sg, 0.0) * (1 - 1e-12)
    assert tau_ah(tp, sg, da, db) <= tau_a(tp, sg, da) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(tau_ps, sigmas, disps, disps, logu(-13, -9), logu(-13, -9))
def test_jitter_only_broadens(tp, sg, da, db, ja, jb):
    assert tau_ah_jittered(tp, sg, da, db, ja, jb) >= tau_ah(tp, sg, da, db)
    assert tau_a_jittered(tp, sg, da, ja) >= tau_a(tp, sg, da)


@settings(max_examples=200, deadline=None)
@given(tau_ps, sigmas, disps, disps)
def test_sign_of_dispersion_irrelevant(tp, sg, da, db):
    assert tau_ah(tp, sg, -da, -db) == pytest.approx(tau_ah(tp, sg, da, db), rel=1e-12)
