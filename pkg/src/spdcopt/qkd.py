"""Entanglement-based BB84 key-rate bound for a central photon-pair source.

Photon A travels to Alice over ``channel_a`` and photon B to Bob over
``channel_b``.  Each party accepts a detection inside a window of width
``xi * tau`` centred on the expected arrival time, where ``tau`` is the
(jitter-augmented) temporal width of its photon.  Dark counts are the only
source of errors.  Key rates are per emitted pair.
"""

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import erf

from ._validation import check_interval, check_nonnegative, check_positive, check_probability
from .analytic import PumpRegime, optimal_pump_fixed_crystal, symmetric_full_optimum
from .exceptions import DomainError
from .numeric import (
    TAU_P_RANGE,
    Axis,
    ScalarSearchSpec,
    bisect_bracket,
    full_optimum_2d,
    maximize_scalar,
    minimize_scalar,
    sweep,
)
from .temporal import (
    ALPHA_SMF_DB_PER_KM,
    BETA_SMF,
    ChannelParams,
    DetectorParams,
    SourceParams,
    tau_a_jittered,
    tau_ah_jittered,
)

XI_BOX = (0.1, 20.0)
#: Shannon-entropy threshold where 1 - 2 H(Q) changes sign.
QBER_THRESHOLD = 0.11002786443835955


@dataclass(frozen=True)
class QkdScenario:
    source: SourceParams
    channel_a: ChannelParams
    channel_b: ChannelParams
    detector_a: DetectorParams = DetectorParams()
    detector_b: DetectorParams = DetectorParams()


@dataclass(frozen=True)
class QkdMetrics:
    """Link figures of merit for one choice of detection windows.

    ``flags`` may contain ``"saturated"`` (a dark-count probability was capped
    at 1), ``"boundary"`` (an optimised window factor sits on the search box)
    and ``"insecure"`` (no window choice yields a positive key).
    """

    p_exp: float
    qber: float
    key_rate: float
    xi_a: float
    xi_b: float
    flags: frozenset = field(default_factory=frozenset)


class WindowOptimum(NamedTuple):
    xi_a: float
    xi_b: float
    metrics: QkdMetrics


# -- elementary pieces ---------------------------------------------------------------


def transmittance(channel):
    """Power transmittance ``10**(-alpha L / 10)`` with alpha in dB/km and L in metres."""
    return 10.0 ** (-channel.alpha_db_per_km * channel.length / 1e4)


def window_capture(xi):
    """Probability that a Gaussian photon lands inside a centred window ``xi`` widths wide."""
    check_nonnegative("xi", xi)
    return erf(np.asarray(xi, dtype=float) / (2.0 * math.sqrt(2.0)))[()]


def dark_count_probability(xi, tau, dark_rate, *, return_flag=False):
    """Dark-count probability ``min(1, 2 d xi tau)`` in one window.

    With ``return_flag=True`` a ``(probability, saturated)`` pair is returned.
    """
    check_nonnegative("xi", xi)
    check_nonnegative("tau", tau)
    check_nonnegative("dark_rate", dark_rate)
    raw = 2.0 * dark_rate * xi * tau
    p = min(1.0, raw)
    return (p, raw > 1.0) if return_flag else p


def binary_entropy(x):
    """Shannon entropy in bits, with ``H(0) = H(1) = 0``."""
    check_probability("x", x)
    x = float(x)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


# -- link model ---------------------------------------------------------------------


class _Link:
    """Scenario with its widths and transmittances cached for repeated window probes."""

    __slots__ = ("t_a", "t_b", "tau_a", "tau_ah", "tau_bh", "d_a", "d_b")

    def __init__(self, scenario):
        src = scenario.source
        da, db = scenario.channel_a.dispersion, scenario.channel_b.dispersion
        ja, jb = scenario.detector_a.jitter, scenario.detector_b.jitter
        self.t_a = transmittance(scenario.channel_a)
        self.t_b = transmittance(scenario.channel_b)
        self.tau_a = float(tau_a_jittered(src.tau_p, src.sigma, da, ja))
        self.tau_ah = float(tau_ah_jittered(src.tau_p, src.sigma, da, db, ja, jb))
        self.tau_bh = float(tau_ah_jittered(src.tau_p, src.sigma, db, da, jb, ja))
        self.d_a = scenario.detector_a.dark_rate
        self.d_b = scenario.detector_b.dark_rate

    def terms(self, xi_a, xi_b):
        """The four coincidence contributions and whether any dark probability saturated."""
        ca = self.t_a * math.erf(xi_a / (2.0 * math.sqrt(2.0)))
        cb = self.t_b * math.erf(xi_b / (2.0 * math.sqrt(2.0)))
        raw_a = 2.0 * self.d_a * xi_a * self.tau_a
        raw_ah = 2.0 * self.d_a * xi_a * self.tau_ah
        raw_bh = 2.0 * self.d_b * xi_b * self.tau_bh
        p_a, p_ah, p_bh = min(1.0, raw_a), min(1.0, raw_ah), min(1.0, raw_bh)
        terms = (
            ca * cb,
            ca * (1.0 - cb) * p_bh,
            (1.0 - ca) * cb * p_ah,
            (1.0 - ca) * (1.0 - cb) * p_a * p_bh,
        )
        return terms, max(raw_a, raw_ah, raw_bh) > 1.0

    def objective(self, xi_a, xi_b):
        """Unclamped ``p (1 - 2 H(Q))`` plus ``(p, Q, saturated)``."""
        terms, sat = self.terms(xi_a, xi_b)
        p = sum(terms)
        if p <= 0.0:
            return 0.0, (0.0, math.nan, sat)
        q = min(0.5, max(0.0, (p - terms[0]) / (2.0 * p)))
        return p * (1.0 - 2.0 * binary_entropy(q)), (p, q, sat)


def _check_windows(xi_a, xi_b):
    check_positive("xi_a", xi_a)
    check_positive("xi_b", xi_b)


def acceptance_terms(scenario, xi_a, xi_b):
    """The four summands of the acceptance probability, in the order
    (both photons, A photon + B dark, A dark + B photon, both dark)."""
    _check_windows(xi_a, xi_b)
    return _Link(scenario).terms(xi_a, xi_b)[0]


def acceptance_probability(scenario, xi_a, xi_b):
    """Probability that both parties register a click in their windows."""
    return float(sum(acceptance_terms(scenario, xi_a, xi_b)))


def qber(scenario, xi_a, xi_b):
    """Quantum bit error rate; accidental coincidences give random bits."""
    terms = acceptance_terms(scenario, xi_a, xi_b)
    p = sum(terms)
    if p <= 0.0:
        raise DomainError("QBER undefined: acceptance probability is zero")
    return min(0.5, max(0.0, (p - terms[0]) / (2.0 * p)))


def _metrics(link, xi_a, xi_b, extra_flags=()):
    val, (p, q, sat) = link.objective(xi_a, xi_b)
    if p <= 0.0:
        raise DomainError("QBER undefined: acceptance probability is zero")
    flags = set(extra_flags)
    if sat:
        flags.add("saturated")
    return QkdMetrics(p_exp=p, qber=q, key_rate=max(0.0, val), xi_a=xi_a, xi_b=xi_b, flags=frozenset(flags))


def key_rate(scenario, xi_a, xi_b):
    """Key-rate lower bound ``max(0, p (1 - 2 H(Q)))`` for fixed window factors."""
    _check_windows(xi_a, xi_b)
    return _metrics(_Link(scenario), xi_a, xi_b)


def _optimize_link(link, box=XI_BOX, rounds=2, start=3.0, rel_tol=1e-6):
    """Coordinate-wise golden-section maximisation; returns (xi_a, xi_b, objective, boundary)."""
    spec = ScalarSearchSpec(box[0], box[1], rel_tol=rel_tol)
    xa = xb = start
    hit_a = hit_b = False
    for _ in range(rounds):
        ra = maximize_scalar(lambda x: link.objective(x, xb)[0], spec)
        xa, hit_a = ra.x, ra.boundary_hit
        rb = maximize_scalar(lambda x: link.objective(xa, x)[0], spec)
        xb, hit_b = rb.x, rb.boundary_hit
    return xa, xb, link.objective(xa, xb)[0], hit_a or hit_b


def optimize_windows(scenario, *, box=XI_BOX, rounds=2):
    """Maximise the key rate over both window factors inside ``box``.

    The unclamped bound is maximised, so the search keeps a slope even where
    the key is zero; a non-positive maximum is reported with the ``"insecure"``
    flag and ``key_rate == 0``.
    """
    check_bracket_pair(box)
    link = _Link(scenario)
    xa, xb, val, hit = _optimize_link(link, box, rounds)
    flags = []
    if hit:
        flags.append("boundary")
    if val <= 0.0:
        flags.append("insecure")
    return WindowOptimum(xa, xb, _metrics(link, xa, xb, flags))


def check_bracket_pair(box):
    lo, hi = box
    check_positive("box[0]", lo)
    check_interval("box[1]", hi, lo, math.inf, closed=(False, False))


def _optimized_objective(scenario):
    return _optimize_link(_Link(scenario))[2]


# -- scenario templates -------------------------------------------------------------

SOURCE_POLICIES = ("fixed", "pump", "full", "pump_key")


@dataclass(frozen=True)
class ScenarioTemplate:
    """Link description with the arm lengths left free.

    ``source_policy`` picks the source for given arm lengths:

    ``fixed``
        use ``tau_p`` and ``sigma`` as given;
    ``pump``
        keep ``sigma`` and choose the pump duration minimising the heralded
        width of photon A;
    ``full``
        choose both source parameters minimising the heralded width of A;
    ``pump_key``
        keep ``sigma`` and choose the pump duration maximising the key rate.
    """

    source_policy: str = "fixed"
    tau_p: float = 1e-9
    sigma: float = 1e12
    beta: float = BETA_SMF
    alpha_db_per_km: float = ALPHA_SMF_DB_PER_KM
    detector_a: DetectorParams = DetectorParams()
    detector_b: DetectorParams = DetectorParams()
    tau_p_range: tuple = TAU_P_RANGE

    def __post_init__(self):
        if self.source_policy not in SOURCE_POLICIES:
            raise DomainError(f"unknown source policy {self.source_policy!r}; choose from {SOURCE_POLICIES}")
        check_positive("tau_p", self.tau_p)
        check_positive("sigma", self.sigma)

    def channels(self, l_a, l_b):
        return (
            ChannelParams(l_a, self.beta, self.alpha_db_per_km),
            ChannelParams(l_b, self.beta, self.alpha_db_per_km),
        )

    def source_for(self, l_a, l_b):
        return _choose_source(self, *self.channels(l_a, l_b))

    def build(self, l_a, l_b):
        ch_a, ch_b = self.channels(l_a, l_b)
        src = _choose_source(self, ch_a, ch_b)
        return QkdScenario(src, ch_a, ch_b, self.detector_a, self.detector_b)

    def with_jitter(self, jitter):
        return replace(
            self,
            detector_a=replace(self.detector_a, jitter=jitter),
            detector_b=replace(self.detector_b, jitter=jitter),
        )


def _no_jitter(t):
    return t.detector_a.jitter == 0.0 and t.detector_b.jitter == 0.0


def _choose_source(t, ch_a, ch_b):
    d_a, d_b = ch_a.dispersion, ch_b.dispersion
    policy = t.source_policy
    if policy == "fixed":
        return SourceParams(t.tau_p, t.sigma)
    if policy == "pump":
        return SourceParams(_pump_for_width(t, d_a, d_b), t.sigma)
    if policy == "full":
        if d_a == d_b and d_a != 0.0 and _no_jitter(t):
            opt = symmetric_full_optimum(d_a)
            return SourceParams(opt.tau_p, opt.sigma)
        if d_a == 0.0 or d_b == 0.0:
            raise DomainError("full source optimisation needs non-zero dispersion in both arms")
        opt = full_optimum_2d(d_a, d_b, jitter_a=t.detector_a.jitter, jitter_b=t.detector_b.jitter)
        return SourceParams(opt.tau_p, opt.sigma)
    return SourceParams(_pump_for_key(t, ch_a, ch_b), t.sigma)


def _pump_for_width(t, d_a, d_b):
    if d_a < 0.0 and d_b < 0.0 and _no_jitter(t):
        opt = optimal_pump_fixed_crystal(d_a, d_b, t.sigma)
        if opt.kind is PumpRegime.INTERIOR_MINIMUM:
            return opt.tau_p_star
    ja, jb = t.detector_a.jitter, t.detector_b.jitter
    res = minimize_scalar(
        lambda tp: tau_ah_jittered(tp, t.sigma, d_a, d_b, ja, jb),
        ScalarSearchSpec(*t.tau_p_range, rel_tol=1e-8),
    )
    return res.x


def _pump_for_key(t, ch_a, ch_b):
    def value(tp):
        scen = QkdScenario(SourceParams(tp, t.sigma), ch_a, ch_b, t.detector_a, t.detector_b)
        return _optimized_objective(scen)

    # coarse decade scan, then golden section around the best point
    lo, hi = t.tau_p_range
    grid = np.geomspace(lo, hi, 4 * int(round(math.log10(hi / lo))) + 1)
    vals = [value(tp) for tp in grid]
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = maximize_scalar(value, ScalarSearchSpec(a, b, rel_tol=1e-5))
    return res.x if res.f >= vals[k] else float(grid[k])


# -- distance and sweeps ------------------------------------------------------------

ARMS = ("A", "B", "both")


def _lengths(arm, length, other):
    if arm == "both":
        return length, length
    if arm == "A":
        return length, other
    return other, length


def _check_arm(arm, other_length):
    if arm not in ARMS:
        raise DomainError(f"arm must be one of {ARMS}, got {arm!r}")
    if arm != "both":
        if other_length is None:
            raise DomainError("other_length is required unless arm='both'")
        check_nonnegative("other_length", other_length)


def security_margin(template, arm, length, other_length=None):
    """Best unclamped key-rate bound at the given arm length (negative when insecure)."""
    _check_arm(arm, other_length)
    return _optimized_objective(template.build(*_lengths(arm, length, other_length)))


def max_security_distance(template, arm="both", other_length=None, *, l_min=1.0, tol=1.0, l_start=100e3, l_cap=1e7):
    """Largest length (m) of the varied arm that still yields a positive key.

    Windows (and the source, per the template policy) are re-optimised at
    every probe.  ``arm="both"`` varies both arms together.
    """
    _check_arm(arm, other_length)
    check_positive("l_min", l_min)
    check_positive("tol", tol)

    def g(length):
        return security_margin(template, arm, length, other_length)

    if g(l_min) <= 0.0:
        raise DomainError(f"link is insecure even at {l_min} m on arm {arm}")
    lo, hi = l_min, max(l_start, 2.0 * l_min)
    while g(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > l_cap:
            raise DomainError(f"key rate still positive at {l_cap} m")
    a, _, _, _ = bisect_bracket(g, lo, hi, tol)
    return a


def _l_b_optimum(template, l_a, l_b_range):
    res = maximize_scalar(
        lambda lb: security_margin(template, "A", l_a, lb),
        ScalarSearchSpec(*l_b_range, rel_tol=1e-4),
    )
    return res.x


L_B_POLICIES = ("fixed", "equal", "optimized")
KEYRATE_OUTPUTS = [
    ("key_rate", "per pair"),
    ("p_exp", ""),
    ("qber", ""),
    ("xi_a", ""),
    ("xi_b", ""),
    ("l_b", "m"),
    ("tau_p", "s"),
    ("sigma", "1/s"),
]


def keyrate_sweep(template, l_a_grid, l_b_policy="equal", *, l_b=None, l_b_range=(1.0, 1e6), threads=1):
    """Optimised key rate along a grid of arm-A lengths.

    ``l_b_policy`` is ``"fixed"`` (use ``l_b``), ``"equal"`` (L_B = L_A) or
    ``"optimized"`` (maximise over L_B in ``l_b_range`` at every point).
    """
    if l_b_policy not in L_B_POLICIES:
        raise DomainError(f"l_b_policy must be one of {L_B_POLICIES}, got {l_b_policy!r}")
    if l_b_policy == "fixed":
        if l_b is None:
            raise DomainError("l_b is required for the fixed policy")
        check_nonnegative("l_b", l_b)

    def cell(point):
        (l_a,) = point
        if l_b_policy == "fixed":
            lb = l_b
        elif l_b_policy == "equal":
            lb = l_a
        else:
            lb = _l_b_optimum(template, l_a, l_b_range)
        scen = template.build(l_a, lb)
        w = optimize_windows(scen)
        m = w.metrics
        return (m.key_rate, m.p_exp, m.qber, w.xi_a, w.xi_b, lb, scen.source.tau_p, scen.source.sigma)

    meta = {"l_b_policy": l_b_policy, "l_b": l_b, "source_policy": template.source_policy}
    return sweep(cell, [Axis("l_a", "m", tuple(l_a_grid))], outputs=KEYRATE_OUTPUTS, threads=threads, metadata=meta)
