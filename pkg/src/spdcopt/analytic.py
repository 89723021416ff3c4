"""Closed-form optima of the temporal widths over the source parameters.

The pump-only optimisation of the heralded width is classified for channels
whose accumulated dispersions are both negative (standard fibre).  Boundary
equalities are resolved toward the "no interior minimum" branch.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

from ._validation import check_negative, check_nonzero, check_positive
from .exceptions import ConsistencyError
from .temporal import tau_ah

#: Lower case threshold on D_B/D_A below which case (3) applies, (4*sqrt(2) - 5) / 7.
RATIO_LOWER = (4.0 * math.sqrt(2.0) - 5.0) / 7.0
#: Upper case threshold on D_B/D_A above which case (2) applies, 4*sqrt(2) + 5.
RATIO_UPPER = 4.0 * math.sqrt(2.0) + 5.0


class PumpRegime(enum.Enum):
    INTERIOR_MINIMUM = "interior"
    INFIMUM_AT_ZERO = "zero"
    INFIMUM_AT_INFINITY = "infinity"


@dataclass(frozen=True)
class PumpOptimum:
    """Result of optimising the pump duration at a fixed crystal.

    ``tau_p_star`` is set only for an interior minimum.  ``tau_ah_at_optimum``
    always holds the optimal (or limiting) heralded width.
    """

    kind: PumpRegime
    tau_p_star: Optional[float]
    tau_ah_at_optimum: float

    @property
    def has_minimum(self):
        return self.kind is PumpRegime.INTERIOR_MINIMUM


@dataclass(frozen=True)
class CaseBoundaries:
    """Critical phase-matching widths (s^-1); ``None`` where not real."""

    xi_plus_minus: Optional[float]
    xi_plus_plus: Optional[float]
    zeta_minus_plus: Optional[float]
    zeta_minus_minus: Optional[float]


@dataclass(frozen=True)
class SymmetricOptimum:
    tau_p: float
    sigma: float
    tau_ah: float


def tau_a_low(d_a, sigma):
    """Pump duration minimising the unheralded width, and that minimum.

    Returns
    -------
    (tau_p_opt, tau_a_min) : tuple of float
    """
    check_nonzero("d_a", d_a)
    check_positive("sigma", sigma)
    ad = abs(d_a)
    return math.sqrt(2.0 * ad), (2.0 + ad * sigma**2) / (2.0 * sigma)


def symmetric_full_optimum(d):
    """Jointly optimal (tau_p, sigma) and heralded width for equal dispersion in both arms."""
    check_nonzero("d", d)
    ad = abs(d)
    return SymmetricOptimum(tau_p=math.sqrt(2.0 * ad), sigma=math.sqrt(2.0 / ad), tau_ah=math.sqrt(2.0 * ad))


def tau_ah_low_sym(d, sigma):
    """Minimum over tau_p of the heralded width at fixed sigma when D_A = D_B = d.

    This is the heralded width evaluated at ``tau_p = sqrt(2|d|)``; the
    prefactor is ``4|d|`` (a ``2|d|`` prefactor would undercut the global optimum).
    """
    check_nonzero("d", d)
    check_positive("sigma", sigma)
    ad = abs(d)
    return math.sqrt(4.0 * ad * (d**2 * sigma**4 + 4.0) / (ad * sigma**2 + 2.0) ** 2)


def _root(value):
    return math.sqrt(value) if value >= 0.0 else None


def _boundaries(d_a, d_b, clamp):
    diff = d_a - d_b
    total = d_a + d_b

    def pair(disc, scale, sign):
        if disc < 0.0:
            if not clamp:
                return {+1: None, -1: None}
            disc = 0.0
        root = math.sqrt(disc)
        return {j: _root(sign * (diff + j * root) / scale) for j in (+1, -1)}

    xi = pair(diff**2 - 8.0 * d_a * total, 2.0 * d_a * d_b, +1.0)
    zeta = pair(diff**2 - 8.0 * d_b * total, d_b * total, -1.0)
    return CaseBoundaries(
        xi_plus_minus=xi[-1],
        xi_plus_plus=xi[+1],
        zeta_minus_plus=zeta[+1],
        zeta_minus_minus=zeta[-1],
    )


def case_boundaries(d_a, d_b):
    """Critical widths separating the pump-optimisation regimes.

    Both dispersions must be negative.  Entries whose discriminant (or whose
    radicand) is negative are returned as ``None``.
    """
    check_negative("d_a", d_a)
    check_negative("d_b", d_b)
    return _boundaries(d_a, d_b, clamp=False)


def tau_ah_limit_zero(d_a, d_b, sigma):
    """Limit of the heralded width as tau_p -> 0."""
    return math.sqrt((d_a**2 * d_b**2 * sigma**4 + (d_a + d_b) ** 2) / (d_b**2 * sigma**2))


def tau_ah_limit_infinity(d_a, d_b, sigma):
    """Limit of the heralded width as tau_p -> infinity."""
    return math.sqrt((16.0 + (d_a + d_b) ** 2 * sigma**4) / (4.0 * sigma**2))


def stationary_pump_duration(d_a, d_b, sigma):
    """Stationary point of the heralded width in tau_p; ``None`` if not real."""
    s2 = sigma**2
    num = 2.0 * (d_a + d_b) - s2 * d_b * (d_a - d_b) + s2**2 * d_a * d_b**2
    den = 8.0 + 2.0 * s2 * (d_a - d_b) + s2**2 * d_b * (d_a + d_b)
    if den == 0.0:
        return None
    ratio = -num / den
    if not ratio > 0.0:
        return None
    return 2.0 * math.sqrt(ratio)


def classify_pump_regime(d_a, d_b, sigma):
    check_negative("d_a", d_a)
    check_negative("d_b", d_b)
    check_positive("sigma", sigma)
    ratio = d_b / d_a
    if RATIO_LOWER < ratio < RATIO_UPPER:
        return PumpRegime.INTERIOR_MINIMUM
    # on a ratio threshold the discriminant is zero up to rounding
    bounds = _boundaries(d_a, d_b, clamp=True)
    if ratio >= RATIO_UPPER:
        lo, hi = bounds.xi_plus_minus, bounds.xi_plus_plus
        outside = PumpRegime.INFIMUM_AT_ZERO
    else:
        lo, hi = bounds.zeta_minus_plus, bounds.zeta_minus_minus
        outside = PumpRegime.INFIMUM_AT_INFINITY
    if lo is None or hi is None:
        raise ConsistencyError(f"case boundaries not real for D_B/D_A = {ratio!r}")
    if sigma < lo or sigma > hi:
        return PumpRegime.INTERIOR_MINIMUM
    return outside


def optimal_pump_fixed_crystal(d_a, d_b, sigma):
    """Optimise the pump duration for a fixed crystal (both dispersions negative).

    Returns
    -------
    PumpOptimum
        For an interior minimum, ``tau_p_star`` is the stationary point of the
        heralded width.  Otherwise the infimum is approached for tau_p -> 0 or
        tau_p -> infinity and ``tau_ah_at_optimum`` carries the limiting width.
    """
    kind = classify_pump_regime(d_a, d_b, sigma)
    if kind is PumpRegime.INFIMUM_AT_ZERO:
        return PumpOptimum(kind, None, tau_ah_limit_zero(d_a, d_b, sigma))
    if kind is PumpRegime.INFIMUM_AT_INFINITY:
        return PumpOptimum(kind, None, tau_ah_limit_infinity(d_a, d_b, sigma))
    tau_p = stationary_pump_duration(d_a, d_b, sigma)
    if tau_p is None:
        raise ConsistencyError(
            f"interior minimum expected but stationary point is not real "
            f"(d_a={d_a!r}, d_b={d_b!r}, sigma={sigma!r})"
        )
    return PumpOptimum(kind, tau_p, float(tau_ah(tau_p, sigma, d_a, d_b)))
