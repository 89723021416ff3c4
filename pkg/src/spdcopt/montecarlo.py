"""Event-level simulation of the heralded coincidence experiment.

Each trial is one emitted pair.  Photons survive their fibre with the link
transmittance and are caught when their arrival time, drawn from a normal
distribution, falls inside a window of ``xi`` widths centred on the expected
arrival.  Dark counts are Poisson with rate ``d`` on each of the two detectors
of a receiver, over the window length.  A coincidence that is not made of two
photons carries a random bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .exceptions import DomainError
from .qkd import _Link


@dataclass(frozen=True)
class SimulationResult:
    n_trials: int
    n_accepted: int
    p_exp: float
    p_exp_se: float
    qber: float
    qber_se: float
    term_fractions: tuple  # per-trial rates of the four coincidence types
    term_se: tuple

    def z_scores(self, p_model, q_model):
        """Deviation of model values in units of the simulation's standard error."""
        zp = (p_model - self.p_exp) / self.p_exp_se if self.p_exp_se > 0 else math.inf
        zq = (q_model - self.qber) / self.qber_se if self.qber_se > 0 else math.inf
        return zp, zq


def simulate_coincidences(scenario, xi_a, xi_b, n_trials=10_000_000, *, seed=0, chunk=1_000_000):
    """Count accepted coincidences and bit errors over ``n_trials`` pairs.

    Parameters
    ----------
    scenario : QkdScenario
    xi_a, xi_b : float
        Window factors.
    n_trials : int
    seed : int
        Seed of the ``numpy.random.Generator``; equal seeds give equal counts.
    chunk : int
        Trials drawn per batch, which bounds memory use.

    Returns
    -------
    SimulationResult
    """
    check_positive("xi_a", xi_a)
    check_positive("xi_b", xi_b)
    if int(n_trials) != n_trials or n_trials < 1:
        raise DomainError(f"n_trials must be a positive integer, got {n_trials!r}")
    link = _Link(scenario)
    rng = np.random.default_rng(seed)
    half_a, half_b = xi_a / 2.0, xi_b / 2.0
    # two detectors per receiver, each open for xi * tau
    mu_a = 2.0 * link.d_a * xi_a * link.tau_a
    mu_ah = 2.0 * link.d_a * xi_a * link.tau_ah
    mu_bh = 2.0 * link.d_b * xi_b * link.tau_bh

    counts = np.zeros(4, dtype=np.int64)
    errors = 0
    done = 0
    while done < n_trials:
        n = min(chunk, n_trials - done)
        done += n
        hit_a = (rng.random(n) < link.t_a) & (np.abs(rng.standard_normal(n)) <= half_a)
        hit_b = (rng.random(n) < link.t_b) & (np.abs(rng.standard_normal(n)) <= half_b)
        dark_b = rng.poisson(mu_bh, n) > 0
        dark_a = np.where(hit_b, rng.poisson(mu_ah, n), rng.poisson(mu_a, n)) > 0
        kinds = (
            hit_a & hit_b,
            hit_a & ~hit_b & dark_b,
            ~hit_a & hit_b & dark_a,
            ~hit_a & ~hit_b & dark_a & dark_b,
        )
        for i, k in enumerate(kinds):
            counts[i] += int(np.count_nonzero(k))
        noisy = int(np.count_nonzero(kinds[1] | kinds[2] | kinds[3]))
        errors += int(rng.binomial(noisy, 0.5))

    accepted = int(counts.sum())
    p = accepted / n_trials
    q = errors / accepted if accepted else math.nan
    fr = counts / n_trials
    return SimulationResult(
        n_trials=int(n_trials),
        n_accepted=accepted,
        p_exp=p,
        p_exp_se=math.sqrt(p * (1.0 - p) / n_trials),
        qber=q,
        qber_se=math.sqrt(q * (1.0 - q) / accepted) if accepted else math.nan,
        term_fractions=tuple(float(x) for x in fr),
        term_se=tuple(float(math.sqrt(x * (1.0 - x) / n_trials)) for x in fr),
    )
