"""Temporal widths of SPDC photons after propagation through dispersive channels.

All quantities are SI: seconds, metres, and angular-frequency detunings in
s^-1.  ``beta`` is half of the channel GVD, so the accumulated dispersion of a
channel is ``D = beta * length`` and the spectral phase picked up by a photon
with detuning ``nu`` is ``D * nu**2``.

The array-level functions (:func:`tau_a`, :func:`tau_ah`, ...) broadcast over
numpy inputs and are what the optimizers call in their inner loops.  The
``SourceParams``-level wrappers mirror the public contract.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive
from .exceptions import DomainError

SPEED_OF_LIGHT = 299_792_458.0

#: Half-GVD of standard single-mode fibre at 1550 nm (s^2/m).
BETA_SMF = -1.15e-26
#: Attenuation of standard single-mode fibre at 1550 nm (dB/km).
ALPHA_SMF_DB_PER_KM = 0.2


@dataclass(frozen=True)
class SourceParams:
    """Photon-pair source: pump pulse duration and phase-matching width.

    Parameters
    ----------
    tau_p : float
        Pump pulse duration in seconds.
    sigma : float
        Effective phase-matching function width in s^-1.
    """

    tau_p: float
    sigma: float

    def __post_init__(self):
        check_positive("tau_p", self.tau_p)
        check_positive("sigma", self.sigma)


@dataclass(frozen=True)
class ChannelParams:
    """A dispersive, lossy fibre channel.

    ``beta`` is in s^2/m and follows the half-GVD convention; the default is
    standard single-mode fibre.
    """

    length: float
    beta: float = BETA_SMF
    alpha_db_per_km: float = ALPHA_SMF_DB_PER_KM

    def __post_init__(self):
        check_nonnegative("length", self.length)
        check_nonnegative("alpha_db_per_km", self.alpha_db_per_km)
        if not np.isfinite(self.beta):
            raise DomainError(f"beta must be finite, got {self.beta!r}")

    @property
    def dispersion(self):
        return accumulated_dispersion(self)


@dataclass(frozen=True)
class DetectorParams:
    """Single-photon detector: timing jitter (s), dark-count rate (1/s), window factor."""

    jitter: float = 0.0
    dark_rate: float = 0.0
    window_factor: float = 1.0

    def __post_init__(self):
        check_nonnegative("jitter", self.jitter)
        check_nonnegative("dark_rate", self.dark_rate)
        check_positive("window_factor", self.window_factor)


@dataclass(frozen=True)
class TemporalWidths:
    tau_unheralded: float
    tau_heralded: float


def accumulated_dispersion(channel):
    """Accumulated dispersion ``D = beta * L`` of a channel, in s^2."""
    return channel.beta * channel.length


def _check_source(tau_p, sigma):
    check_positive("tau_p", tau_p)
    check_positive("sigma", sigma)


def tau_a(tau_p, sigma, d_a):
    """Unheralded temporal width of photon A (array version)."""
    _check_source(tau_p, sigma)
    tau_p = np.asarray(tau_p, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d_a = np.asarray(d_a, dtype=float)
    st2 = (sigma * tau_p) ** 2
    out = np.sqrt((tau_p**2 + d_a**2 * sigma**2) * (4.0 + st2)) / (2.0 * sigma * tau_p)
    return out[()] if out.ndim == 0 else out


def tau_ah(tau_p, sigma, d_a, d_b):
    """Temporal width of photon A heralded by the detection of photon B."""
    _check_source(tau_p, sigma)
    tau_p = np.asarray(tau_p, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d_a = np.asarray(d_a, dtype=float)
    d_b = np.asarray(d_b, dtype=float)
    s2 = sigma**2
    st2p4 = s2 * tau_p**2 + 4.0
    num = 16.0 * (tau_p**2 - d_a * d_b * s2) ** 2 + (d_a + d_b) ** 2 * st2p4**2
    den = 4.0 * (tau_p**2 + d_b**2 * s2) * st2p4
    out = np.sqrt(num / den)
    return out[()] if out.ndim == 0 else out


def jitter_weight(tau_p, sigma, d_a, d_b):
    """Weight ``X`` with which the heralding detector's jitter enters the heralded width."""
    _check_source(tau_p, sigma)
    tau_p = np.asarray(tau_p, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d_a = np.asarray(d_a, dtype=float)
    d_b = np.asarray(d_b, dtype=float)
    s2 = sigma**2
    st2 = s2 * tau_p**2
    num = (tau_p**2 - d_a * d_b * s2) ** 2 * (st2 - 4.0) ** 2
    den = (tau_p**2 + d_b**2 * s2) ** 2 * (st2 + 4.0) ** 2
    out = num / den
    return out[()] if out.ndim == 0 else out


def tau_a_jittered(tau_p, sigma, d_a, jitter_a):
    check_nonnegative("jitter_a", jitter_a)
    return np.hypot(tau_a(tau_p, sigma, d_a), jitter_a)


def tau_ah_jittered(tau_p, sigma, d_a, d_b, jitter_a, jitter_b):
    check_nonnegative("jitter_a", jitter_a)
    check_nonnegative("jitter_b", jitter_b)
    x = jitter_weight(tau_p, sigma, d_a, d_b)
    return np.sqrt(tau_ah(tau_p, sigma, d_a, d_b) ** 2 + np.square(jitter_a) + x * np.square(jitter_b))


# -- SourceParams-level API ---------------------------------------------------


def tau_unheralded(source, d_a):
    """Width (s) of photon A when the detection time of photon B is unknown.

    Parameters
    ----------
    source : SourceParams
    d_a : float
        Accumulated dispersion of channel A in s^2.
    """
    return tau_a(source.tau_p, source.sigma, d_a)


def tau_heralded(source, d_a, d_b):
    """Width (s) of photon A conditioned on the detection time of photon B.

    Swapping ``d_a`` and ``d_b`` gives the heralded width of photon B.  The
    result does not depend on the heralding time because the joint arrival-time
    distribution is Gaussian.
    """
    return tau_ah(source.tau_p, source.sigma, d_a, d_b)


def tau_unheralded_jittered(source, d_a, jitter_a):
    """Unheralded width convolved with detector A's Gaussian jitter."""
    return tau_a_jittered(source.tau_p, source.sigma, d_a, jitter_a)


def heralding_jitter_weight(source, d_a, d_b):
    """Dimensionless factor in [0, 1) multiplying the heralding detector's jitter variance."""
    return jitter_weight(source.tau_p, source.sigma, d_a, d_b)


def tau_heralded_jittered(source, d_a, d_b, jitter_a, jitter_b):
    """Heralded width of photon A including the jitter of both detectors."""
    return tau_ah_jittered(source.tau_p, source.sigma, d_a, d_b, jitter_a, jitter_b)


def temporal_widths(source, d_a, d_b):
    return TemporalWidths(
        tau_unheralded=float(tau_unheralded(source, d_a)),
        tau_heralded=float(tau_heralded(source, d_a, d_b)),
    )


# -- unit helpers ---------------------------------------------------------------


def sigma_to_bandwidth(sigma, wavelength):
    """Wavelength bandwidth (m) equivalent to a detuning width ``sigma`` (s^-1)."""
    check_positive("wavelength", wavelength)
    return np.asarray(wavelength) ** 2 * np.asarray(sigma) / (2.0 * np.pi * SPEED_OF_LIGHT)


def bandwidth_to_sigma(bandwidth, wavelength):
    check_positive("wavelength", wavelength)
    return 2.0 * np.pi * SPEED_OF_LIGHT * np.asarray(bandwidth) / np.asarray(wavelength) ** 2
