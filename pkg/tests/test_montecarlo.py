import pytest

from spdcopt.exceptions import DomainError
from spdcopt.montecarlo import simulate_coincidences
from spdcopt.qkd import acceptance_probability, acceptance_terms, qber
from spdcopt.verification import random_qkd_scenarios


def test_deterministic_for_seed():
    scen, xa, xb = random_qkd_scenarios(1, seed=4)[0]
    a = simulate_coincidences(scen, xa, xb, 200_000, seed=7)
    b = simulate_coincidences(scen, xa, xb, 200_000, seed=7)
    c = simulate_coincidences(scen, xa, xb, 200_000, seed=8)
    assert a == b
    assert a.n_accepted != c.n_accepted


@pytest.mark.parametrize("k", range(3))
def test_agrees_with_model(k):
    scen, xa, xb = random_qkd_scenarios(3, seed=11)[k]
    sim = simulate_coincidences(scen, xa, xb, 2_000_000, seed=k)
    zp, zq = sim.z_scores(acceptance_probability(scen, xa, xb), qber(scen, xa, xb))
    assert abs(zp) < 4 and abs(zq) < 4
    for got, se, want in zip(sim.term_fractions, sim.term_se, acceptance_terms(scen, xa, xb)):
        assert abs(got - want) < 4 * se + 1e-12


def test_rejects_bad_trials():
    scen, xa, xb = random_qkd_scenarios(1)[0]
    with pytest.raises(DomainError):
        simulate_coincidences(scen, xa, xb, 0)
