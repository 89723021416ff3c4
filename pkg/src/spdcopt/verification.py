"""Self-check suites shared by the ``verify`` command and the test-suite.

Each suite returns a :class:`SuiteReport`; none of them raises on a failed
comparison, only on invalid input.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import PumpRegime, classify_pump_regime
from .exceptions import GridError
from .montecarlo import simulate_coincidences
from .oracle import GridSpec, empirical_widths, joint_temporal_intensity, jittered_widths
from .qkd import QkdScenario, acceptance_probability, qber
from .temporal import (
    BETA_SMF,
    ChannelParams,
    DetectorParams,
    SourceParams,
    tau_a,
    tau_a_jittered,
    tau_ah,
    tau_ah_jittered,
)


@dataclass
class SuiteReport:
    name: str
    passed: bool
    n_cases: int
    worst: float
    tolerance: float
    details: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.n_cases} cases, worst {self.worst:.3g} (tolerance {self.tolerance:g})"


# ranges of the randomised parameter grids
TAU_P_DECADES = (-13.0, -9.0)
SIGMA_DECADES = (10.0, 13.0)
LENGTH_DECADES = (0.0, 5.0)


def random_sources(n, seed=0, beta=BETA_SMF):
    """``n`` log-uniform draws of ``(tau_p, sigma, d_a, d_b)``."""
    rng = np.random.default_rng(seed)
    tp = 10.0 ** rng.uniform(*TAU_P_DECADES, n)
    sg = 10.0 ** rng.uniform(*SIGMA_DECADES, n)
    la = 10.0 ** rng.uniform(*LENGTH_DECADES, n)
    lb = 10.0 ** rng.uniform(*LENGTH_DECADES, n)
    return [(float(a), float(b), beta * float(c), beta * float(d)) for a, b, c, d in zip(tp, sg, la, lb)]


def oracle_suite(n=100, seed=0, grid=GridSpec(), tol=1e-3, perturb=0.0):
    """Closed-form widths against the numerical transform.

    ``perturb`` scales the closed-form heralded width by ``1 + perturb``; it
    exists so that the suite's sensitivity can itself be checked.
    """
    worst, details, ok = 0.0, [], True
    for tp, sg, da, db in random_sources(n, seed):
        try:
            ew = empirical_widths(joint_temporal_intensity(SourceParams(tp, sg), da, db, grid))
        except GridError as exc:
            return SuiteReport("oracle", False, len(details), math.inf, tol, details + [f"GridError: {exc}"])
        ra = abs(ew.tau_a / float(tau_a(tp, sg, da)) - 1.0)
        rh = abs(ew.tau_ah / (float(tau_ah(tp, sg, da, db)) * (1.0 + perturb)) - 1.0)
        worst = max(worst, ra, rh)
        ok &= ew.slice_spread < tol
        details.append((tp, sg, da, db, ra, rh, ew.slice_spread))
    return SuiteReport("oracle", ok and worst < tol, n, worst, tol, details)


def jitter_suite(n=20, seed=1, grid=GridSpec(), tol=1e-3, jitter_decades=(-12.0, -10.5)):
    """Jitter-augmented widths against explicit convolution of the oracle intensity."""
    rng = np.random.default_rng(seed + 1000)
    worst, details = 0.0, []
    for tp, sg, da, db in random_sources(n, seed):
        ja, jb = 10.0 ** rng.uniform(*jitter_decades, 2)
        try:
            ji = joint_temporal_intensity(SourceParams(tp, sg), da, db, grid)
        except GridError as exc:
            return SuiteReport("jitter", False, len(details), math.inf, tol, details + [f"GridError: {exc}"])
        ta, tah = jittered_widths(ji, ja, jb)
        ra = abs(ta / float(tau_a_jittered(tp, sg, da, ja)) - 1.0)
        rh = abs(tah / float(tau_ah_jittered(tp, sg, da, db, ja, jb)) - 1.0)
        worst = max(worst, ra, rh)
        details.append((tp, sg, da, db, ja, jb, ra, rh))
    return SuiteReport("jitter", worst < tol, n, worst, tol, details)


def classify_by_scan(d_a, d_b, sigma, n=20001, decades=8.0):
    """Regime of ``tau_Ah(tau_p)`` read off a dense logarithmic scan.

    The scan covers ``decades`` beyond the smallest and largest natural time
    scale of the problem on either side.
    """
    scales = [math.sqrt(abs(d_a)), math.sqrt(abs(d_b)), 1.0 / sigma, abs(d_a) * sigma, abs(d_b) * sigma]
    lo = math.log10(min(scales)) - decades
    hi = math.log10(max(scales)) + decades
    tp = np.logspace(lo, hi, n)
    f = np.asarray(tau_ah(tp, sigma, d_a, d_b), dtype=float)
    i = int(np.argmin(f))
    if 0 < i < n - 1 and f[i] < min(f[0], f[-1]) * (1.0 - 1e-12):
        return PumpRegime.INTERIOR_MINIMUM
    return PumpRegime.INFIMUM_AT_ZERO if f[0] <= f[-1] else PumpRegime.INFIMUM_AT_INFINITY


def random_triples(n, seed=0):
    rng = np.random.default_rng(seed)
    d = -(10.0 ** rng.uniform(-26.0, -20.0, (n, 2)))
    s = 10.0 ** rng.uniform(9.0, 14.0, n)
    return [(float(a), float(b), float(c)) for (a, b), c in zip(d, s)]


def classification_suite(n=200, seed=0):
    """Analytic regime classification against :func:`classify_by_scan`."""
    bad = []
    for d_a, d_b, sg in random_triples(n, seed):
        got, ref = classify_pump_regime(d_a, d_b, sg), classify_by_scan(d_a, d_b, sg)
        if got is not ref:
            bad.append((d_a, d_b, sg, got.value, ref.value))
    return SuiteReport("classification", not bad, n, float(len(bad)), 0.0, bad)


def random_qkd_scenarios(n=10, seed=0):
    """Scenarios with dark counts strong enough to show in ``1e7`` trials."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        la, lb = rng.uniform(5e3, 80e3, 2)
        dark = 10.0 ** rng.uniform(5.0, 7.0)
        jit = rng.uniform(0.0, 1e-10)
        det = DetectorParams(jitter=jit, dark_rate=dark)
        src = SourceParams(10.0 ** rng.uniform(-12.0, -9.0), 10.0 ** rng.uniform(11.0, 12.7))
        scen = QkdScenario(src, ChannelParams(la), ChannelParams(lb), det, det)
        xa, xb = rng.uniform(1.0, 8.0, 2)
        out.append((scen, float(xa), float(xb)))
    return out


def montecarlo_suite(n=10, trials=10_000_000, seed=0, n_sigma=3.0):
    """Acceptance probability and QBER against the event simulation."""
    worst, details = 0.0, []
    for k, (scen, xa, xb) in enumerate(random_qkd_scenarios(n, seed)):
        sim = simulate_coincidences(scen, xa, xb, trials, seed=seed * 1000 + k)
        zp, zq = sim.z_scores(acceptance_probability(scen, xa, xb), qber(scen, xa, xb))
        worst = max(worst, abs(zp), abs(zq))
        details.append((k, zp, zq))
    return SuiteReport("montecarlo", worst < n_sigma, n, worst, n_sigma, details)
