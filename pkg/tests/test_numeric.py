import math

import numpy as np
import pytest

from spdcopt.analytic import symmetric_full_optimum
from spdcopt.exceptions import BracketError, ConvergenceError, DomainError
from spdcopt.numeric import (
    Axis,
    ScalarSearchSpec,
    bisect_bracket,
    bisect_zero_crossing,
    full_optimum_2d,
    maximize_scalar,
    minimize_scalar,
    sweep,
)


def test_golden_section_log_parabola():
    res = minimize_scalar(lambda x: (math.log(x) - math.log(3e-12)) ** 2, ScalarSearchSpec(1e-15, 1e-6))
    assert res.x == pytest.approx(3e-12, rel=1e-7)
    assert not res.boundary_hit


def test_monotone_objective_reports_boundary():
    res = minimize_scalar(lambda x: x, ScalarSearchSpec(1.0, 10.0))
    assert res.x == pytest.approx(1.0, rel=1e-7) and res.boundary_hit


def test_maximize_returns_maximum():
    res = maximize_scalar(lambda x: -((x - 2.0) ** 2) + 5.0, ScalarSearchSpec(0.1, 10.0))
    assert res.f == pytest.approx(5.0) and res.x == pytest.approx(2.0, rel=1e-6)


def test_iteration_cap():
    with pytest.raises(ConvergenceError) as err:
        minimize_scalar(lambda x: x, ScalarSearchSpec(1.0, 1e6, rel_tol=1e-12, max_iter=3))
    assert err.value.best_x is not None


def test_non_finite_objective():
    with pytest.raises(DomainError):
        minimize_scalar(lambda x: math.nan, ScalarSearchSpec(1.0, 2.0))


def test_bad_spec():
    with pytest.raises(DomainError):
        ScalarSearchSpec(2.0, 1.0)


def test_bisection():
    assert bisect_zero_crossing(lambda x: x * x - 2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2), abs=1e-11)
    with pytest.raises(BracketError):
        bisect_bracket(lambda x: x * x + 1.0, -1.0, 1.0, 1e-9)


@pytest.mark.parametrize("length", [1.0, 1e3, 1e5])
def test_full_optimum_reproduces_symmetric_closed_form(length):
    d = -1.15e-26 * length
    ref = symmetric_full_optimum(d)
    got = full_optimum_2d(d, d)
    assert got.tau_p == pytest.approx(ref.tau_p, rel=1e-4)
    assert got.sigma == pytest.approx(ref.sigma, rel=1e-4)
    assert got.tau_ah == pytest.approx(ref.tau_ah, rel=1e-10)
    assert not got.boundary_hit


def test_full_optimum_with_jitter_not_worse_than_coarse():
    got = full_optimum_2d(-1e-22, -3e-23, jitter_a=1e-11, jitter_b=5e-11)
    assert got.tau_ah <= got.coarse_min


def _cell(p):
    x, y = p
    if x == 2.0 and y == 20.0:
        raise DomainError("bad cell")
    return x * y, x + y


def test_sweep_order_failures_and_threads():
    axes = [Axis("x", "s", (1.0, 2.0, 3.0)), Axis("y", "", (10.0, 20.0))]
    a = sweep(_cell, axes, outputs=[("p", ""), ("s", "")])
    b = sweep(_cell, axes, outputs=[("p", ""), ("s", "")], threads=4)
    assert a.header() == ["x [s]", "y", "p", "s"]
    rows = list(a.rows())
    assert [r[:2] for r in rows] == [(1.0, 10.0), (1.0, 20.0), (2.0, 10.0), (2.0, 20.0), (3.0, 10.0), (3.0, 20.0)] or [
        list(r[:2]) for r in rows
    ] == [[1.0, 10.0], [1.0, 20.0], [2.0, 10.0], [2.0, 20.0], [3.0, 10.0], [3.0, 20.0]]
    assert np.array_equal(np.asarray(list(a.rows())), np.asarray(list(b.rows())), equal_nan=True)
    assert len(a.failures) == 1 and "bad cell" in next(iter(a.failures.values()))


def test_axis_validation():
    with pytest.raises(DomainError):
        Axis("x", "", ())
    with pytest.raises(DomainError):
        Axis("x", "", (1.0, 1.0))
