"""Derivative-free optimisation, parameter sweeps and bisection.

Every search here works on the logarithm of its coordinate, because pump
durations, phase-matching widths and fibre lengths span many decades.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_bracket, check_interval, check_nonzero, check_nonnegative
from .exceptions import BracketError, ConvergenceError, DomainError
from .temporal import tau_ah_jittered

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

TAU_P_RANGE = (1e-15, 1e-6)
SIGMA_RANGE = (1e8, 1e14)


@dataclass(frozen=True)
class ScalarSearchSpec:
    """Bracket ``[lo, hi]`` searched on a log scale, relative tolerance, iteration cap."""

    lo: float
    hi: float
    rel_tol: float = 1e-8
    max_iter: int = 500

    def __post_init__(self):
        check_bracket(self.lo, self.hi)
        check_interval("rel_tol", self.rel_tol, 0.0, 1.0, closed=(False, False))
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter!r}")


@dataclass(frozen=True)
class ScalarMinimum:
    x: float
    f: float
    boundary_hit: bool = False
    n_eval: int = 0


def minimize_scalar(f, spec):
    """Golden-section search for the minimum of ``f`` on ``[spec.lo, spec.hi]``.

    The search runs on ``u = log(x)`` until the bracket satisfies
    ``hi / lo - 1 <= rel_tol``.  Both end points are evaluated as well, so a
    monotone objective returns the better end with ``boundary_hit`` set.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` iterations do not shrink the bracket enough.  The best
        iterate is attached to the exception.
    DomainError
        If ``f`` returns a non-finite value.
    """
    n_eval = 0

    def g(u):
        nonlocal n_eval
        n_eval += 1
        val = float(f(math.exp(u)))
        if not math.isfinite(val):
            raise DomainError(f"objective is not finite at x={math.exp(u)!r}: {val!r}")
        return val

    a, b = math.log(spec.lo), math.log(spec.hi)
    target = math.log1p(spec.rel_tol)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    it = 0
    while b - a > target:
        if it >= spec.max_iter:
            u, fu = (c, fc) if fc <= fd else (d, fd)
            raise ConvergenceError(
                f"golden-section search did not converge in {spec.max_iter} iterations",
                best_x=math.exp(u),
                best_f=fu,
            )
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = g(d)

    u, fu = (c, fc) if fc <= fd else (d, fd)
    lo_u, hi_u = math.log(spec.lo), math.log(spec.hi)
    f_lo, f_hi = g(lo_u), g(hi_u)
    best = min((fu, 1, u), (f_lo, 0, lo_u), (f_hi, 2, hi_u))
    fu, _, u = best
    near_edge = (u - lo_u) <= 2 * target or (hi_u - u) <= 2 * target
    return ScalarMinimum(x=math.exp(u), f=fu, boundary_hit=near_edge, n_eval=n_eval)


def maximize_scalar(f, spec):
    """Maximise ``f``; the returned ``f`` field holds the maximum (not its negative)."""
    res = minimize_scalar(lambda x: -f(x), spec)
    return ScalarMinimum(x=res.x, f=-res.f, boundary_hit=res.boundary_hit, n_eval=res.n_eval)


# -- 2-D source optimum ----------------------------------------------------------


@dataclass(frozen=True)
class FullOptimum:
    """Joint optimum over (tau_p, sigma) of the heralded width."""

    tau_p: float
    sigma: float
    tau_ah: float
    boundary_hit: bool
    coarse_min: float
    n_rounds: int = 0


_DIRECTIONS = (
    (1.0, 0.0),
    (0.0, 1.0),
    (math.sqrt(0.5), math.sqrt(0.5)),
    (math.sqrt(0.5), -math.sqrt(0.5)),
)


def _step_limits(u, v, du, dv, box_u, box_v):
    """Range of ``t`` keeping ``(u + t du, v + t dv)`` inside the log box."""
    lo, hi = -math.inf, math.inf
    for x, d, (a, b) in ((u, du, box_u), (v, dv, box_v)):
        if d > 0:
            lo, hi = max(lo, (a - x) / d), min(hi, (b - x) / d)
        elif d < 0:
            lo, hi = max(lo, (b - x) / d), min(hi, (a - x) / d)
    return lo, hi


def full_optimum_2d(
    d_a,
    d_b,
    *,
    jitter_a=0.0,
    jitter_b=0.0,
    tau_p_range=TAU_P_RANGE,
    sigma_range=SIGMA_RANGE,
    n_grid=64,
    rel_tol=1e-8,
    max_rounds=500,
):
    """Minimise the (optionally jittered) heralded width over pump duration and sigma.

    A ``n_grid`` x ``n_grid`` log-spaced scan locates the basin; coordinate
    descent with golden-section line searches then refines it until the joint
    relative change of both coordinates drops below ``rel_tol``.  Each round
    searches along both log axes and both diagonals; the diagonals follow the
    valleys at constant ``sigma * tau_p`` that appear once jitter dominates.
    """
    check_nonzero("d_a", d_a)
    check_nonzero("d_b", d_b)
    check_nonnegative("jitter_a", jitter_a)
    check_nonnegative("jitter_b", jitter_b)
    check_bracket(*tau_p_range)
    check_bracket(*sigma_range)
    if n_grid < 64:
        raise DomainError(f"n_grid must be at least 64, got {n_grid!r}")

    def obj(u, v):
        return float(tau_ah_jittered(math.exp(u), math.exp(v), d_a, d_b, jitter_a, jitter_b))

    tps = np.geomspace(*tau_p_range, n_grid)
    sgs = np.geomspace(*sigma_range, n_grid)
    grid = tau_ah_jittered(tps[:, None], sgs[None, :], d_a, d_b, jitter_a, jitter_b)
    i, j = np.unravel_index(np.argmin(grid), grid.shape)
    coarse_min = float(grid[i, j])
    u, v = math.log(tps[i]), math.log(sgs[j])
    best = coarse_min
    box_u = (math.log(tau_p_range[0]), math.log(tau_p_range[1]))
    box_v = (math.log(sigma_range[0]), math.log(sigma_range[1]))

    # line searches span a few coarse cells, widening when they end on their edge;
    # moves are accepted only on strict improvement, so a flat objective stops the loop
    cell = (box_u[1] - box_u[0]) / (n_grid - 1)
    spans = [2.0 * cell] * len(_DIRECTIONS)
    line_tol = rel_tol / 10.0
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        u0, v0 = u, v
        for k, (du, dv) in enumerate(_DIRECTIONS):
            t_lo, t_hi = _step_limits(u, v, du, dv, box_u, box_v)
            t_lo, t_hi = max(t_lo, -spans[k]), min(t_hi, spans[k])
            if t_hi - t_lo <= line_tol:
                continue
            # golden section runs on log(x), so x = exp(t) gives a linear search in t
            r = minimize_scalar(
                lambda x: obj(u + math.log(x) * du, v + math.log(x) * dv),
                ScalarSearchSpec(math.exp(t_lo), math.exp(t_hi), rel_tol=line_tol),
            )
            if r.f < best:
                t = math.log(r.x)
                u, v, best = u + t * du, v + t * dv, r.f
            spans[k] = 2.0 * spans[k] if r.boundary_hit else max(cell, 0.5 * spans[k])
        if max(abs(u - u0), abs(v - v0)) < rel_tol:
            break
    else:
        raise ConvergenceError(
            f"coordinate descent did not converge in {max_rounds} rounds",
            best_x=(math.exp(u), math.exp(v)),
            best_f=best,
        )

    tp, sg = math.exp(u), math.exp(v)
    tol = 4.0 * rel_tol
    edge = (
        u - box_u[0] <= tol or box_u[1] - u <= tol or v - box_v[0] <= tol or box_v[1] - v <= tol
    )
    return FullOptimum(tau_p=tp, sigma=sg, tau_ah=best, boundary_hit=edge, coarse_min=coarse_min, n_rounds=rounds)


# -- sweeps ---------------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    unit: str
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError(f"axis {self.name!r} is empty")
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"axis {self.name!r} has non-finite values")
        if len(vals) > 1:
            diffs = np.diff(vals)
            if not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise DomainError(f"axis {self.name!r} must be strictly monotone")
        object.__setattr__(self, "values", vals)


@dataclass
class SweepResult:
    """Dense grid of results in row-major order of ``axes``.

    ``values`` holds the primary output; further named outputs live in
    ``extras``.  ``failures`` maps a flat cell index to the error message of
    any cell that raised or returned a non-finite value.
    """

    axes: list
    values: np.ndarray
    metadata: dict = field(default_factory=dict)
    outputs: list = field(default_factory=lambda: [("value", "")])
    extras: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def shape(self):
        return tuple(len(a.values) for a in self.axes)

    def rows(self):
        """Yield ``(axis values..., outputs...)`` tuples in row-major order."""
        names = [name for name, _ in self.outputs]
        columns = [self.values.ravel()] + [self.extras[n].ravel() for n in names[1:]]
        for flat, idx in enumerate(np.ndindex(*self.shape)):
            coords = tuple(a.values[k] for a, k in zip(self.axes, idx))
            yield coords + tuple(float(c[flat]) for c in columns)

    def header(self):
        cols = [(a.name, a.unit) for a in self.axes] + list(self.outputs)
        return [f"{n} [{u}]" if u else n for n, u in cols]


def _evaluate_cell(f, point, n_out):
    try:
        res = f(point)
    except Exception as exc:  # recorded per cell, never fatal
        return (math.nan,) * n_out, f"{type(exc).__name__}: {exc}"
    res = tuple(float(v) for v in np.atleast_1d(res))
    if len(res) != n_out:
        return (math.nan,) * n_out, f"expected {n_out} outputs, got {len(res)}"
    if not all(math.isfinite(v) for v in res):
        return res, "non-finite value"
    return res, None


def sweep(f, axes, *, outputs=None, threads=1, metadata=None):
    """Evaluate ``f`` on the Cartesian product of ``axes``.

    ``f`` receives a tuple with one value per axis and returns either a scalar
    or a sequence matching ``outputs`` (a list of ``(name, unit)`` pairs).
    Cells may run on a thread pool; assembly is by cell index, so the result
    does not depend on ``threads``.
    """
    axes = list(axes)
    if not axes:
        raise DomainError("sweep needs at least one axis")
    outputs = list(outputs) if outputs else [("value", "")]
    n_out = len(outputs)
    shape = tuple(len(a.values) for a in axes)
    points = [tuple(a.values[k] for a, k in zip(axes, idx)) for idx in np.ndindex(*shape)]

    if threads and threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(lambda p: _evaluate_cell(f, p, n_out), points))
    else:
        results = [_evaluate_cell(f, p, n_out) for p in points]

    table = np.array([r[0] for r in results], dtype=float).reshape(shape + (n_out,))
    failures = {k: r[1] for k, r in enumerate(results) if r[1] is not None}
    extras = {name: table[..., m] for m, (name, _) in enumerate(outputs) if m > 0}
    return SweepResult(
        axes=axes,
        values=table[..., 0],
        metadata=dict(metadata or {}),
        outputs=outputs,
        extras=extras,
        failures=failures,
    )


# -- bisection ------------------------------------------------------------------


def bisect_bracket(g, lo, hi, tol, *, max_iter=200):
    """Shrink a sign-change bracket of ``g`` to width ``tol``.

    Returns ``(a, b, g_a, g_b)`` with ``g_a`` and ``g_b`` of opposite sign (or
    one of them zero).
    """
    check_interval("tol", tol, 0.0, math.inf, closed=(False, False))
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"need lo < hi, got lo={lo!r}, hi={hi!r}")
    g_lo, g_hi = float(g(lo)), float(g(hi))
    if g_lo == 0.0:
        return lo, lo, g_lo, g_lo
    if g_hi == 0.0:
        return hi, hi, g_hi, g_hi
    if (g_lo > 0) == (g_hi > 0):
        raise BracketError(
            f"g has the same sign at both ends ({g_lo!r} at {lo!r}, {g_hi!r} at {hi!r}); widen the bracket"
        )
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        g_mid = float(g(mid))
        if g_mid == 0.0:
            return mid, mid, g_mid, g_mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    else:
        raise ConvergenceError(f"bisection did not reach tol={tol!r}", best_x=0.5 * (lo + hi))
    return lo, hi, g_lo, g_hi


def bisect_zero_crossing(g, lo, hi, tol=1e-12):
    """Zero of ``g`` on ``[lo, hi]`` by bisection; the midpoint of the final bracket."""
    a, b, _, _ = bisect_bracket(g, lo, hi, tol)
    return 0.5 * (a + b)


def dense_scan_argmin(f, lo, hi, n=10_000):
    """Argmin of ``f`` over a log-spaced grid; a brute-force reference for tests."""
    xs = np.geomspace(lo, hi, n)
    vals = np.array([f(x) for x in xs])
    k = int(np.argmin(vals))
    return float(xs[k]), float(vals[k])

