import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from spdcopt.exceptions import DomainError
from spdcopt.qkd import (
    QBER_THRESHOLD,
    QkdScenario,
    ScenarioTemplate,
    acceptance_probability,
    acceptance_terms,
    binary_entropy,
    dark_count_probability,
    key_rate,
    max_security_distance,
    optimize_windows,
    qber,
    security_margin,
    transmittance,
    window_capture,
)
from spdcopt.temporal import ChannelParams, DetectorParams, SourceParams

DET = DetectorParams(dark_rate=1e3)


def scenario(l_a=20e3, l_b=20e3, dark=1e3, jitter=0.0, src=SourceParams(1e-9, 1e12)):
    det = DetectorParams(jitter=jitter, dark_rate=dark)
    return QkdScenario(src, ChannelParams(l_a), ChannelParams(l_b), det, det)


def test_elementary_pieces():
    assert transmittance(ChannelParams(50e3)) == pytest.approx(0.1)
    assert window_capture(2.0 * math.sqrt(2.0)) == pytest.approx(erf(1.0))
    assert dark_count_probability(3.0, 1e-11, 1e3) == pytest.approx(6e-8)
    assert dark_count_probability(3.0, 1.0, 1e3, return_flag=True) == (1.0, True)
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.0) == 0.0
    assert 1.0 - 2.0 * binary_entropy(QBER_THRESHOLD) == pytest.approx(0.0, abs=1e-12)


def test_no_dark_counts_means_no_errors():
    s = scenario(dark=0.0)
    assert qber(s, 3.0, 3.0) == 0.0
    t = acceptance_terms(s, 3.0, 3.0)
    assert t[1:] == (0.0, 0.0, 0.0)
    assert acceptance_probability(s, 3.0, 3.0) == pytest.approx(transmittance(ChannelParams(20e3)) ** 2 * erf(3.0 / (2 * math.sqrt(2))) ** 2)


def test_key_rate_formula():
    s = scenario()
    m = key_rate(s, 2.0, 2.5)
    assert m.key_rate == pytest.approx(max(0.0, m.p_exp * (1 - 2 * binary_entropy(m.qber))))


def test_key_rate_clamped_when_insecure():
    m = key_rate(scenario(l_a=400e3, l_b=400e3, dark=1e6), 5.0, 5.0)
    assert m.key_rate == 0.0 and m.qber > QBER_THRESHOLD


def test_optimized_windows_beat_fixed_choice():
    s = scenario(100e3, 100e3)
    w = optimize_windows(s)
    for xa, xb in [(2.0, 2.0), (3.0, 3.0), (1.0, 4.0)]:
        assert w.metrics.key_rate >= key_rate(s, xa, xb).key_rate


def test_invalid_windows():
    with pytest.raises(DomainError):
        key_rate(scenario(), 0.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 15), st.floats(0.1, 15), st.floats(0, 150e3), st.floats(0, 150e3))
def test_probability_bounds(xa, xb, la, lb):
    s = scenario(la, lb, dark=1e4)
    p = acceptance_probability(s, xa, xb)
    assert 0.0 < p <= 1.0
    assert 0.0 <= qber(s, xa, xb) <= 0.5


def test_max_distance_shrinks_with_dark_rate():
    lo = max_security_distance(ScenarioTemplate(detector_a=DET, detector_b=DET))
    det = DetectorParams(dark_rate=1e5)
    hi = max_security_distance(ScenarioTemplate(detector_a=det, detector_b=det))
    assert hi < lo
    assert security_margin(ScenarioTemplate(detector_a=DET, detector_b=DET), "both", lo - 1e3) > 0


def test_template_policies():
    t = ScenarioTemplate("pump", detector_a=DET, detector_b=DET)
    assert t.build(1e3, 1e3).source.tau_p == pytest.approx(math.sqrt(2 * 1.15e-23))
    with pytest.raises(DomainError):
        ScenarioTemplate("nonsense")
    with pytest.raises(DomainError):
        max_security_distance(t, "A")
