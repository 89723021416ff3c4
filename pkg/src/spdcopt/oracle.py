"""Numerical reference for the joint arrival-time distribution of a photon pair.

The joint spectral amplitude is sampled, multiplied by the dispersion phases
``exp(i D_A nu_A**2 + i D_B nu_B**2)`` and Fourier transformed to the time
domain; widths are then measured on the resulting intensity.  No closed-form
width enters the computation.

A plain 2-D FFT would need millions of samples per axis once the chirp
``|D| sigma**2`` is large, so the transform is organised differently:

* The amplitude factorises in the rotated variables ``p = nu_A - nu_B`` and
  ``q = nu_A + nu_B`` except for the cross term of the phase.  Writing the
  time amplitude as an integral over ``q`` of a 1-D transform over ``p``
  evaluated at a shifted argument keeps every step one-dimensional.
* Each 1-D transform is evaluated by direct summation ("near") or, when its
  chirp is strong, through the exact chirp / Fourier / chirp identity
  ("far"), which moves the chirp onto the output variable.
* The same construction is available starting from the time-domain
  amplitude of the pair (Fresnel propagation).  The cheapest combination of
  representation, inner axis and near/far treatment is selected per state.

Sampling steps follow the non-aliasing condition: the period ``2 pi / step``
of every discrete sum exceeds the evaluation range plus the support of the
transform.  Supports come from the exact second moments of the state, which
are obtained by non-oscillatory quadrature in the spectral domain.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_nonnegative, check_positive
from .exceptions import DomainError, GridError

# integrands are truncated where |F|^2 has fallen by exp(-S**2 / 2)
_S_INT = 13.0
_N_MOMENT = 241
_EDGE_LIMIT = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the oracle.

    ``n_points`` caps the number of integration nodes per axis,
    ``n_output`` is the number of lattice points per axis of the returned
    intensity and of every conditional slice, ``span_factor`` is the
    half-width of the output windows in standard deviations, and
    ``oversample`` scales all integration node counts.
    """

    n_points: int = 1024
    n_output: int = 256
    span_factor: float = 12.0
    oversample: float = 1.0

    def __post_init__(self):
        for name in ("n_points", "n_output"):
            n = getattr(self, name)
            if int(n) != n or n < 2 or (int(n) & (int(n) - 1)):
                raise DomainError(f"{name} must be a power of two, got {n!r}")
        if self.span_factor < 8.0:
            raise DomainError(f"span_factor must be at least 8, got {self.span_factor!r}")
        check_positive("oversample", self.oversample)


# -- 1-D amplitude factors ---------------------------------------------------------


class _Factor:
    """A 1-D amplitude with its derivative and the spreads of ``|F|^2`` and of ``|F^|^2``."""

    def __init__(self, fn, dfn, std, std_ft):
        self.fn, self.dfn, self.std, self.std_ft = fn, dfn, std, std_ft


def _gaussian(width):
    def fn(x):
        return np.exp(-((x / width) ** 2)).astype(complex)

    def dfn(x):
        return -2.0 * x / width**2 * fn(x)

    return _Factor(fn, dfn, width / 2.0, 1.0 / width)


def _fourier(factor, sign=-1.0):
    """Numerical transform ``t -> sum_p F(p) exp(sign i p t) dp`` of a factor."""
    half = _S_INT * factor.std

    def nodes(t):
        t_max = float(np.max(np.abs(t))) if np.size(t) else 0.0
        step = 2.0 * math.pi / (t_max + _S_INT * factor.std_ft)
        n = int(math.ceil(2.0 * half / step)) + 1
        p = np.linspace(-half, half, n)
        return p, factor.fn(p) * (p[1] - p[0])

    def fn(t):
        t = np.asarray(t, dtype=float)
        p, w = nodes(t)
        return np.exp(sign * 1j * np.multiply.outer(t, p)) @ w

    def dfn(t):
        t = np.asarray(t, dtype=float)
        p, w = nodes(t)
        return np.exp(sign * 1j * np.multiply.outer(t, p)) @ (sign * 1j * p * w)

    return _Factor(fn, dfn, factor.std_ft, factor.std)


# -- the 2-D transform -------------------------------------------------------------


def _node_count(half, step, oversample):
    n = int(math.ceil(oversample * 2.0 * half / step)) + 1
    return n + (n % 2 == 0)  # odd count keeps a node at zero


class _Plane:
    """``psi(x, y) = int int F(p) G(q) exp(i(a p^2 + b q^2 + 2 c p q) - i(p x + q y)) dp dq``.

    ``to_time`` maps ``(x, y)`` to the arrival times ``(t_A, t_B)``.
    """

    def __init__(self, F, G, a, b, c, to_time, label):
        self.F, self.G, self.a, self.b, self.c = F, G, a, b, c
        self.to_time = np.asarray(to_time, dtype=float)
        self.label = label

    def swapped(self):
        return _Plane(self.G, self.F, self.b, self.a, self.c, self.to_time[:, ::-1], self.label + "/swap")

    def moments(self):
        """Mean and covariance of ``(x, y)`` under ``|psi|^2``, by spectral quadrature."""
        p = np.linspace(-_S_INT * self.F.std, _S_INT * self.F.std, _N_MOMENT)
        q = np.linspace(-_S_INT * self.G.std, _S_INT * self.G.std, _N_MOMENT)
        f, df = self.F.fn(p)[:, None], self.F.dfn(p)[:, None]
        g, dg = self.G.fn(q)[None, :], self.G.dfn(q)[None, :]
        th_p = 2.0 * self.a * p[:, None] + 2.0 * self.c * q[None, :]
        th_q = 2.0 * self.b * q[None, :] + 2.0 * self.c * p[:, None]
        amp = f * g
        dp = df * g + 1j * amp * th_p
        dq = f * dg + 1j * amp * th_q
        norm = np.sum(np.abs(amp) ** 2)
        mean = np.array([np.sum(np.conj(amp) * (-1j) * dp).real, np.sum(np.conj(amp) * (-1j) * dq).real]) / norm
        sxx = np.sum(np.abs(dp) ** 2) / norm - mean[0] ** 2
        syy = np.sum(np.abs(dq) ** 2) / norm - mean[1] ** 2
        sxy = np.sum(np.conj(dp) * dq).real / norm - mean[0] * mean[1]
        return mean, np.array([[sxx, sxy], [sxy, syy]])

    def plan(self, corners, mean, cov, far, cap, oversample):
        """Integration nodes for evaluation inside the convex hull of ``corners``, or None."""
        a, b, c = self.a, self.b, self.c
        F, G = self.F, self.G
        if far and a == 0.0:
            return None
        x_max = float(np.max(np.abs(corners[:, 0])))
        q_half = _S_INT * G.std
        xp_max = x_max + 2.0 * abs(c) * q_half
        if not far:
            s_half = _S_INT * F.std
            spread = math.sqrt(F.std_ft**2 + 4.0 * a * a * F.std**2)
            s_step = 2.0 * math.pi / (xp_max + _S_INT * spread)
            kappa, beta = 0.0, b
            ym, ys = abs(mean[1]), math.sqrt(cov[1, 1])
        else:
            s_half = _S_INT * F.std_ft
            spread = math.sqrt(F.std**2 + F.std_ft**2 / (4.0 * a * a))
            s_step = 2.0 * math.pi / (xp_max / (2.0 * abs(a)) + _S_INT * spread)
            kappa, beta = c / a, b - c * c / a
            # outer output variable is y' = y - kappa x
            ym = abs(mean[1] - kappa * mean[0])
            ys = math.sqrt(max(cov[1, 1] - 2 * kappa * cov[0, 1] + kappa**2 * cov[0, 0], 0.0))
        y_eval = float(np.max(np.abs(corners[:, 1] - kappa * corners[:, 0])))
        q_step = 2.0 * math.pi / (y_eval + ym + (_S_INT + 1.0) * ys)
        n_s = _node_count(s_half, s_step, oversample)
        n_q = _node_count(q_half, q_step, oversample)
        if n_s > cap or n_q > cap:
            return None
        s, q = np.linspace(-s_half, s_half, n_s), np.linspace(-q_half, q_half, n_q)
        return _Sums(self, s, q, far, kappa, beta, x_max, y_eval)


class _Sums:
    """Discretised evaluator of one :class:`_Plane`."""

    def __init__(self, plane, s, q, far, kappa, beta, x_max, y_eff_max):
        self.plane, self.s, self.q, self.far = plane, s, q, far
        self.kappa = kappa
        # planned range: |x| <= x_max and |y - kappa x| <= y_eff_max
        self.x_max, self.y_eff_max = x_max, y_eff_max
        a, c = plane.a, plane.c
        ds, dq = s[1] - s[0], q[1] - q[0]
        if far:
            Fh = _fourier(plane.F, -1.0)
            self.w = Fh.fn(s) * np.exp(-1j * s * s / (4.0 * a)) * ds
            self.alpha, self.gamma = 1.0 / (2.0 * a), -c / a
        else:
            self.w = plane.F.fn(s) * np.exp(1j * a * s * s) * ds
            self.alpha, self.gamma = -1.0, 2.0 * c
        self.v = plane.G.fn(q) * np.exp(1j * beta * q * q) * dq
        self.B = np.exp(1j * self.gamma * np.multiply.outer(s, q))

    @property
    def cost(self):
        return len(self.s) * len(self.q)

    def _inner(self, x):
        return (np.exp(1j * self.alpha * np.multiply.outer(x, self.s)) * self.w) @ self.B

    def _check(self, x, y):
        tol = 1e-9
        y_eff = np.asarray(y) - self.kappa * np.asarray(x)
        if np.max(np.abs(x)) > self.x_max * (1 + tol) or np.max(np.abs(y_eff)) > self.y_eff_max * (1 + tol):
            raise GridError("evaluation point outside the planned range; the sampling would alias")

    def points(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        self._check(x, y)
        m = self._inner(x)
        y_eff = y - self.kappa * x
        return np.sum(m * self.v * np.exp(-1j * np.multiply.outer(y_eff, self.q)), axis=1)

    def lattice(self, xs, zs, shear):
        """Amplitude at ``(x_i, z_l + shear x_i)``, shape ``(len(xs), len(zs))``."""
        xs, zs = np.asarray(xs, dtype=float), np.asarray(zs, dtype=float)
        cx = np.array([xs[0], xs[0], xs[-1], xs[-1]])
        self._check(cx, np.array([zs[0], zs[-1], zs[0], zs[-1]]) + shear * cx)
        m = self._inner(xs) * self.v
        m *= np.exp(-1j * np.multiply.outer((shear - self.kappa) * xs, self.q))
        return m @ np.exp(-1j * np.multiply.outer(self.q, zs))


# -- public API --------------------------------------------------------------------


@dataclass
class JointIntensity:
    """Joint arrival-time intensity on a (generally sheared) lattice.

    ``t_a`` and ``t_b`` hold the arrival times of every lattice node and
    ``intensity`` sums to one.  ``amplitude(t_a, t_b)`` evaluates the time
    amplitude (up to a constant factor) at arbitrary points inside the planned
    range, which is what conditional slices use.
    """

    t_a: np.ndarray
    t_b: np.ndarray
    intensity: np.ndarray
    amplitude: object = field(repr=False)
    info: dict = field(default_factory=dict)

    def stats(self):
        """Lattice mean and covariance of ``(t_A, t_B)``."""
        w = self.intensity
        ma, mb = np.sum(w * self.t_a), np.sum(w * self.t_b)
        da, db = self.t_a - ma, self.t_b - mb
        cov = np.array(
            [[np.sum(w * da * da), np.sum(w * da * db)], [np.sum(w * da * db), np.sum(w * db * db)]]
        )
        return np.array([ma, mb]), cov


def _representations(source, d_a, d_b):
    f = _gaussian(source.sigma)
    g = _gaussian(2.0 / source.tau_p)
    reps = [_Plane(f, g, (d_a + d_b) / 4.0, (d_a + d_b) / 4.0, (d_a - d_b) / 4.0, [[1, 1], [-1, 1]], "freq")]
    if d_a != 0.0 and d_b != 0.0:
        pa, pb = -1.0 / (4.0 * d_a), -1.0 / (4.0 * d_b)
        ft_f, ft_g = _fourier(f, -1.0), _fourier(g, -1.0)
        # propagated time t_X = 2 D'_X Omega_X with D' = -D
        reps.append(
            _Plane(ft_f, ft_g, pa + pb, pa + pb, pa - pb, [[-d_a, -d_a], [d_b, -d_b]], "time")
        )
    return reps


def _window(mean, cov, span):
    """Lattice window in (x, z = y - k x) and the matching evaluation bounds."""
    k = cov[0, 1] / cov[0, 0]
    sz = math.sqrt(max(cov[1, 1] - cov[0, 1] ** 2 / cov[0, 0], 0.0))
    if not sz > 0.0:
        raise GridError("state is degenerate on the output plane")
    sx = math.sqrt(cov[0, 0])
    xs = (mean[0] - span * sx, mean[0] + span * sx)
    mz = mean[1] - k * mean[0]
    zs = (mz - span * sz, mz + span * sz)
    return xs, zs, k


def _slice_corners(plane, mean, cov, span):
    """Corners in (x, y) of the region every requested slice stays inside."""
    tm = plane.to_time @ mean
    tc = plane.to_time @ cov @ plane.to_time.T
    sb = math.sqrt(tc[1, 1])
    cond = math.sqrt(max(tc[0, 0] - tc[0, 1] ** 2 / tc[1, 1], 0.0))
    slope = tc[0, 1] / tc[1, 1]
    inv = np.linalg.inv(plane.to_time)
    pts = []
    for db in (-span * sb, span * sb):
        for da in (-1.5 * span * cond, 1.5 * span * cond):
            pts.append(inv @ np.array([tm[0] + slope * db + da, tm[1] + db]))
    return np.array(pts)


def joint_temporal_intensity(source, d_a, d_b, grid=GridSpec()):
    """Joint arrival-time intensity after dispersive propagation.

    Raises
    ------
    GridError
        If no representation can be sampled within ``grid.n_points`` nodes per
        axis without aliasing, if ``grid.n_points`` is below 256, or if the
        intensity at the lattice edge exceeds ``1e-12`` of its peak.
    """
    if grid.n_points < 256:
        raise GridError(f"n_points={grid.n_points} is below the minimum of 256; the transform would alias")
    span = grid.span_factor
    best = None
    for rep in _representations(source, float(d_a), float(d_b)):
        for plane in (rep, rep.swapped()):
            mean, cov = plane.moments()
            xs, zs, k = _window(mean, cov, span)
            lattice = np.array([(x, z + k * x) for x in xs for z in zs])
            corners = np.vstack([lattice, _slice_corners(plane, mean, cov, span)])
            for far in (False, True):
                sums = plane.plan(corners, mean, cov, far, grid.n_points, grid.oversample)
                if sums is not None and (best is None or sums.cost < best[0].cost):
                    best = (sums, mean, cov, xs, zs, k)
    if best is None:
        raise GridError(
            f"no representation fits in n_points={grid.n_points}; raise n_points or shorten the links"
        )
    sums, mean, cov, xs, zs, k = best
    plane = sums.plane
    x_nodes = np.linspace(*xs, grid.n_output)
    z_nodes = np.linspace(*zs, grid.n_output)
    amp = sums.lattice(x_nodes, z_nodes, k)
    inten = np.abs(amp) ** 2
    peak = inten.max()
    edge = max(inten[0].max(), inten[-1].max(), inten[:, 0].max(), inten[:, -1].max())
    if not peak > 0 or edge > _EDGE_LIMIT * peak:
        raise GridError(f"edge intensity {edge / peak:.2e} of peak; widen the span or add points")
    x2 = x_nodes[:, None] * np.ones_like(z_nodes)[None, :]
    y2 = z_nodes[None, :] + k * x_nodes[:, None]
    t_a = plane.to_time[0, 0] * x2 + plane.to_time[0, 1] * y2
    t_b = plane.to_time[1, 0] * x2 + plane.to_time[1, 1] * y2
    inv = np.linalg.inv(plane.to_time)

    def amplitude(ta, tb):
        ta, tb = np.broadcast_arrays(np.asarray(ta, dtype=float), np.asarray(tb, dtype=float))
        x = inv[0, 0] * ta + inv[0, 1] * tb
        y = inv[1, 0] * ta + inv[1, 1] * tb
        return sums.points(x.ravel(), y.ravel()).reshape(ta.shape)

    info = {
        "representation": plane.label,
        "mode": "far" if sums.far else "near",
        "n_inner": len(sums.s),
        "n_outer": len(sums.q),
        "edge_ratio": float(edge / peak),
    }
    return JointIntensity(t_a=t_a, t_b=t_b, intensity=inten / inten.sum(), amplitude=amplitude, info=info)


def synthetic_joint_intensity(std_a, std_b, rho=0.0, n_output=256, span_factor=12.0):
    """Correlated Gaussian test intensity with known marginal spreads."""
    check_positive("std_a", std_a)
    check_positive("std_b", std_b)
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho!r}")
    cov = np.array([[std_a**2, rho * std_a * std_b], [rho * std_a * std_b, std_b**2]])
    prec = np.linalg.inv(cov)

    def amplitude(ta, tb):
        ta, tb = np.broadcast_arrays(np.asarray(ta, dtype=float), np.asarray(tb, dtype=float))
        quad = prec[0, 0] * ta * ta + 2 * prec[0, 1] * ta * tb + prec[1, 1] * tb * tb
        return np.exp(-quad / 4.0).astype(complex)

    xs, zs, k = _window(np.zeros(2), cov, span_factor)
    ta = np.linspace(*xs, n_output)[:, None] * np.ones(n_output)[None, :]
    tb = np.linspace(*zs, n_output)[None, :] + k * ta
    inten = np.abs(amplitude(ta, tb)) ** 2
    return JointIntensity(t_a=ta, t_b=tb, intensity=inten / inten.sum(), amplitude=amplitude, info={"synthetic": True})


# -- width estimators --------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalWidths:
    tau_a: float
    tau_ah: float
    slice_t_b: tuple
    slice_widths: tuple

    @property
    def slice_spread(self):
        """Largest pairwise relative difference between the slice widths."""
        w = np.asarray(self.slice_widths)
        return float((w.max() - w.min()) / w.min())


def _slice(ji, t_b, center, width, n):
    """Mass, mean and spread of ``|psi(., t_b)|^2``, refined until the window fits."""
    result = None
    for _ in range(4):
        ta = np.linspace(center - 12.0 * width, center + 12.0 * width, n)
        try:
            w = np.abs(ji.amplitude(ta, np.full_like(ta, t_b))) ** 2
        except GridError:
            if result is None:
                raise
            return result  # a refinement of a negligible slice drifted off the plan
        mass = w.sum()
        if not mass > 0:
            return 0.0, center, width
        m = np.sum(w * ta) / mass
        s = math.sqrt(np.sum(w * (ta - m) ** 2) / mass)
        result = (mass * (ta[1] - ta[0]), m, s)
        if abs(m - center) < 0.5 * width and abs(s / width - 1.0) < 0.05:
            return result
        center, width = m, s
    return result


def empirical_widths(ji, *, n_slice=None, min_mass=1e-6):
    """Marginal spread of ``t_A`` and its spread conditioned on ``t_B``.

    The conditional spread is measured on three slices at the mean of
    ``t_B`` and one marginal standard deviation either side, and averaged.
    Slices carrying less than ``min_mass`` of the central slice are skipped
    with a warning.
    """
    n = n_slice or ji.intensity.shape[0]
    mean, cov = ji.stats()
    tau_a = math.sqrt(cov[0, 0])
    sb = math.sqrt(cov[1, 1])
    slope = cov[0, 1] / cov[1, 1]
    cond = math.sqrt(max(cov[0, 0] - cov[0, 1] ** 2 / cov[1, 1], 0.0)) or tau_a * 1e-3
    results = []
    for off in (0.0, -sb, sb):
        tb = mean[1] + off
        results.append((tb,) + _slice(ji, tb, mean[0] + slope * off, cond, n))
    ref = results[0][1]
    kept = []
    for tb, mass, _, s in results:
        if mass < min_mass * ref:
            warnings.warn(f"slice at t_B={tb!r} skipped: mass {mass / ref:.1e} of the central slice", stacklevel=2)
            continue
        kept.append((tb, s))
    if not kept:
        raise GridError("no conditional slice carries enough mass")
    return EmpiricalWidths(
        tau_a=tau_a,
        tau_ah=float(np.mean([s for _, s in kept])),
        slice_t_b=tuple(tb for tb, _ in kept),
        slice_widths=tuple(s for _, s in kept),
    )


def jittered_widths(ji, jitter_a, jitter_b, *, n_kernel=49):
    """Widths after convolving the intensity with Gaussian detector responses.

    The heralding detector's response is integrated numerically: the
    conditional distribution at the mean heralding time is the mixture of the
    un-jittered slices at ``t_B - t'`` weighted by ``N(t'; jitter_b)`` and the
    slice mass.  Detector A's response adds its variance to every slice.

    Returns
    -------
    (tau_a_jittered, tau_ah_jittered) : tuple of float
    """
    check_nonnegative("jitter_a", jitter_a)
    check_nonnegative("jitter_b", jitter_b)
    n = ji.intensity.shape[0]
    mean, cov = ji.stats()
    sb = math.sqrt(cov[1, 1])
    slope = cov[0, 1] / cov[1, 1]
    cond = math.sqrt(max(cov[0, 0] - cov[0, 1] ** 2 / cov[1, 1], 0.0)) or math.sqrt(cov[0, 0]) * 1e-3
    tau_a = math.sqrt(cov[0, 0] + jitter_a**2)
    if jitter_b == 0.0:
        _, _, s = _slice(ji, mean[1], mean[0], cond, n)
        return tau_a, math.sqrt(s * s + jitter_a**2)

    # the kernel times the slice mass is concentrated within w_eff of zero offset
    w_eff = 1.0 / math.sqrt(1.0 / jitter_b**2 + 1.0 / sb**2)
    offsets = np.linspace(-8.0 * w_eff, 8.0 * w_eff, n_kernel)
    weights, means, variances = [], [], []
    for off in offsets:
        tb = mean[1] - off
        mass, m, s = _slice(ji, tb, mean[0] - slope * off, cond, n)
        weights.append(mass * math.exp(-0.5 * (off / jitter_b) ** 2))
        means.append(m)
        variances.append(s * s)
    wts = np.asarray(weights) / np.sum(weights)
    mu = np.sum(wts * np.asarray(means))
    var = np.sum(wts * (np.asarray(variances) + (np.asarray(means) - mu) ** 2))
    return tau_a, math.sqrt(var + jitter_a**2)


def oracle_widths(source, d_a, d_b, grid=GridSpec()):
    """Convenience wrapper: build the intensity and measure both widths."""
    return empirical_widths(joint_temporal_intensity(source, d_a, d_b, grid))
