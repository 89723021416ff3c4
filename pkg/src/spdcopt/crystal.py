"""Phase-matching width of a type-I BBO crystal for degenerate down-conversion.

The pump is an extraordinary wave, the two daughter photons are ordinary.
Angular frequencies are in rad/s, wavevectors in 1/m, angles in radians.
"""

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ._validation import check_interval, check_positive
from .exceptions import DomainError, SingularSigmaError
from .numeric import bisect_bracket
from .temporal import SPEED_OF_LIGHT

C = SPEED_OF_LIGHT
DETUNING_MODES = ("signal", "anticorrelated")


@dataclass(frozen=True)
class SellmeierSet:
    """Two-ray Sellmeier coefficients ``(A, B, C, D)`` for
    ``n**2 = A + B / (lam**2 - C) - D * lam**2`` with ``lam`` in micrometres."""

    name: str
    ordinary: tuple
    extraordinary: tuple
    validity: tuple
    provenance: str = ""

    def __post_init__(self):
        for label, coeffs in (("ordinary", self.ordinary), ("extraordinary", self.extraordinary)):
            if len(coeffs) != 4:
                raise DomainError(f"{label} needs 4 coefficients, got {len(coeffs)}")
        lo, hi = self.validity
        if not 0 < lo < hi:
            raise DomainError(f"bad validity range {self.validity!r}")

    @classmethod
    def from_json(cls, path_or_dict):
        data = path_or_dict
        if not isinstance(data, dict):
            with open(path_or_dict) as fh:
                data = json.load(fh)
        return cls(
            name=data["name"],
            ordinary=tuple(data["ordinary"]),
            extraordinary=tuple(data["extraordinary"]),
            validity=tuple(data["validity_m"]),
            provenance=data.get("provenance", ""),
        )

    def _index(self, coeffs, wavelength):
        lo, hi = self.validity
        check_interval("wavelength", wavelength, lo, hi)
        a, b, c, d = coeffs
        x = (np.asarray(wavelength, dtype=float) * 1e6) ** 2
        return np.sqrt(a + b / (x - c) - d * x)[()]

    def n_o(self, wavelength):
        return self._index(self.ordinary, wavelength)

    def n_e(self, wavelength):
        return self._index(self.extraordinary, wavelength)


def load_bbo():
    """The bundled BBO coefficient set."""
    text = resources.files("spdcopt").joinpath("data/bbo_sellmeier.json").read_text()
    return SellmeierSet.from_json(json.loads(text))


BBO = load_bbo()


def refractive_index_o(wavelength, sellmeier=BBO):
    return sellmeier.n_o(wavelength)


def refractive_index_e(wavelength, sellmeier=BBO):
    return sellmeier.n_e(wavelength)


def _wavelength(omega):
    return 2.0 * math.pi * C / omega


def refractive_index_pump(omega, theta, sellmeier=BBO):
    """Extraordinary index at angle ``theta`` to the optic axis.

    Written as ``n_o n_e / sqrt(n_e**2 cos**2 + n_o**2 sin**2)``, which equals
    the usual ``tan``-form and stays finite at ``theta = pi/2``.
    """
    check_positive("omega", omega)
    check_interval("theta", theta, 0.0, math.pi / 2)
    lam = _wavelength(np.asarray(omega, dtype=float))
    no, ne = sellmeier.n_o(lam), sellmeier.n_e(lam)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return (no * ne / np.sqrt(ne**2 * c2 + no**2 * s2))[()]


def _k_z(omega, k_x, sellmeier):
    k = omega * sellmeier.n_o(_wavelength(omega)) / C
    rad = k * k - k_x * k_x
    if rad < 0:
        raise DomainError(f"evanescent wave: |k_x|={abs(k_x)!r} exceeds k={k!r}")
    return math.sqrt(rad)


def phase_mismatch(omega_s, omega_i, k_sx, k_ix, theta, sellmeier=BBO):
    """Longitudinal phase mismatch ``k_p - k_sz - k_iz`` in 1/m."""
    check_positive("omega_s", omega_s)
    check_positive("omega_i", omega_i)
    omega_p = omega_s + omega_i
    k_p = omega_p * float(refractive_index_pump(omega_p, theta, sellmeier)) / C
    return k_p - _k_z(omega_s, k_sx, sellmeier) - _k_z(omega_i, k_ix, sellmeier)


@dataclass(frozen=True)
class CrystalSpec:
    """Crystal length, collected mode width, internal emission angle and wavelengths."""

    length: float
    mode_width: float
    emission_angle: float = 0.0
    pump_wavelength: float = 775e-9
    signal_wavelength: float = 1550e-9

    def __post_init__(self):
        check_positive("length", self.length)
        check_positive("mode_width", self.mode_width)
        check_interval("emission_angle", self.emission_angle, 0.0, math.pi / 2, closed=(True, False))
        check_positive("pump_wavelength", self.pump_wavelength)
        check_positive("signal_wavelength", self.signal_wavelength)
        if not math.isclose(self.signal_wavelength, 2.0 * self.pump_wavelength, rel_tol=1e-9):
            raise DomainError("only degenerate down-conversion is supported (signal = 2 x pump wavelength)")

    @property
    def omega_s(self):
        return 2.0 * math.pi * C / self.signal_wavelength


def central_configuration(spec, sellmeier=BBO):
    """``(omega_s, omega_i, k_sx, k_ix)`` at the degenerate centre of emission."""
    ws = spec.omega_s
    k_s = ws * float(sellmeier.n_o(spec.signal_wavelength)) / C
    k_sx = k_s * math.sin(spec.emission_angle)
    return ws, ws, k_sx, -k_sx


def phase_matching_angle(spec, sellmeier=BBO, *, tol=1e-13):
    """Cut angle in (0, pi/2) at which the central configuration is phase matched."""
    ws, wi, k_sx, k_ix = central_configuration(spec, sellmeier)

    def g(theta):
        return phase_mismatch(ws, wi, k_sx, k_ix, theta, sellmeier)

    lo, hi = 0.0, math.pi / 2
    if (g(lo) > 0) == (g(hi) > 0):
        raise DomainError(
            f"not phase-matchable: no sign change of the mismatch on (0, pi/2) "
            f"for emission angle {spec.emission_angle!r} rad"
        )
    a, b, g_a, g_b = bisect_bracket(g, lo, hi, tol)
    return a if abs(g_a) <= abs(g_b) else b


@dataclass(frozen=True)
class SigmaEstimate:
    sigma: float
    theta: float
    delta_k: float
    delta_omega: float


def mismatch_derivatives(spec, theta, sellmeier=BBO, *, rel_step=1e-6, detuning="signal"):
    """Central differences ``(d dk/d k_sx, d dk/d omega_s)`` at the central configuration.

    ``detuning="signal"`` varies the signal frequency alone; ``"anticorrelated"``
    moves signal and idler in opposite directions (pump fixed).
    """
    if detuning not in DETUNING_MODES:
        raise DomainError(f"detuning must be one of {DETUNING_MODES}, got {detuning!r}")
    ws, wi, k_sx, k_ix = central_configuration(spec, sellmeier)
    k_s = ws * float(sellmeier.n_o(spec.signal_wavelength)) / C

    hk = rel_step * k_s
    d_k = (
        phase_mismatch(ws, wi, k_sx + hk, k_ix, theta, sellmeier)
        - phase_mismatch(ws, wi, k_sx - hk, k_ix, theta, sellmeier)
    ) / (2.0 * hk)

    hw = rel_step * ws
    sign = -1.0 if detuning == "anticorrelated" else 0.0
    d_w = (
        phase_mismatch(ws + hw, wi + sign * hw, k_sx, k_ix, theta, sellmeier)
        - phase_mismatch(ws - hw, wi - sign * hw, k_sx, k_ix, theta, sellmeier)
    ) / (2.0 * hw)
    return d_k, d_w


def effective_sigma(spec, sellmeier=BBO, *, rel_step=1e-6, detuning="signal", theta=None):
    """Effective phase-matching width (s^-1) of the crystal and collection optics.

    Parameters
    ----------
    spec : CrystalSpec
    rel_step : float
        Relative finite-difference step in frequency and transverse wavevector.
    detuning : {"signal", "anticorrelated"}
        Direction of the frequency derivative.  At degeneracy the
        anticorrelated derivative vanishes by symmetry, so that choice always
        raises :class:`SingularSigmaError`.
    theta : float, optional
        Cut angle; defaults to :func:`phase_matching_angle`.

    Returns
    -------
    SigmaEstimate
    """
    if theta is None:
        theta = phase_matching_angle(spec, sellmeier)
    d_k, d_w = mismatch_derivatives(spec, theta, sellmeier, rel_step=rel_step, detuning=detuning)
    # inverse group velocity scale, n/c ~ 5e-9 s/m; anything far below is numerical zero
    scale = float(sellmeier.n_o(spec.signal_wavelength)) / C
    if abs(d_w) < 1e-9 * scale:
        raise SingularSigmaError(
            f"sigma estimate singular: frequency derivative of the mismatch is {d_w!r} s/m"
        )
    sigma = math.sqrt((d_k**2 / spec.mode_width**2 + 5.0 / spec.length**2) / d_w**2)
    return SigmaEstimate(sigma=sigma, theta=theta, delta_k=d_k, delta_omega=d_w)
