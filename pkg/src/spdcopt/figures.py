"""Data behind each figure, as :class:`~spdcopt.numeric.SweepResult` grids.

Each builder takes the resolved (SI) configuration and returns one sweep.
Families of curves are an extra axis; categorical axes are coded as
integers and decoded in the sweep metadata.
"""

import numpy as np

from .analytic import PumpRegime, optimal_pump_fixed_crystal, symmetric_full_optimum
from .crystal import CrystalSpec, effective_sigma
from .exceptions import DomainError
from .numeric import Axis, full_optimum_2d, sweep
from .qkd import ScenarioTemplate, optimize_windows
from .temporal import DetectorParams, tau_ah, tau_ah_jittered

FIGURES = ("3a", "3b", "4a", "4b", "5", "6", "7", "8a", "8b")

REGIME_CODES = {PumpRegime.INTERIOR_MINIMUM: 0, PumpRegime.INFIMUM_AT_ZERO: 1, PumpRegime.INFIMUM_AT_INFINITY: 2}


def _logspace(lo, hi, n):
    return tuple(np.logspace(lo, hi, n))


def _pump_curves(cfg, l_b, threads):
    beta = cfg["fiber"]["beta"]
    d_a, d_b = beta * 1e3, beta * l_b

    def cell(p):
        sigma, tp = p
        return float(tau_ah(tp, sigma, d_a, d_b))

    axes = [Axis("sigma", "1/s", (1e10, 1e11, 1e12)), Axis("tau_p", "s", _logspace(-14, -9, cfg["sweep"]["n"]))]
    return sweep(cell, axes, outputs=[("tau_ah", "s")], threads=threads, metadata={"l_a": 1e3, "l_b": l_b})


def _source_map(cfg, l_b, threads):
    beta = cfg["fiber"]["beta"]
    d_a, d_b = beta * 1e3, beta * l_b
    n = cfg["sweep"]["n"]

    def cell(p):
        tp, sigma = p
        return float(tau_ah(tp, sigma, d_a, d_b))

    axes = [Axis("tau_p", "s", _logspace(-14, -9, n)), Axis("sigma", "1/s", _logspace(10, 13, n))]
    return sweep(cell, axes, outputs=[("tau_ah", "s")], threads=threads, metadata={"l_a": 1e3, "l_b": l_b})


def fig_3a(cfg, threads=1):
    return _pump_curves(cfg, 1e3, threads)


def fig_3b(cfg, threads=1):
    return _pump_curves(cfg, 1e5, threads)


def fig_4a(cfg, threads=1):
    return _source_map(cfg, 1e3, threads)


def fig_4b(cfg, threads=1):
    return _source_map(cfg, 1e5, threads)


def fig_5(cfg, threads=1):
    """Heralded width minimised over the pump, on the (L_B, sigma) plane at L_A = 1 km."""
    beta = cfg["fiber"]["beta"]
    n = cfg["sweep"]["n"]

    def cell(p):
        l_b, sigma = p
        opt = optimal_pump_fixed_crystal(beta * 1e3, beta * l_b, sigma)
        tp = opt.tau_p_star if opt.has_minimum else 0.0
        return opt.tau_ah_at_optimum, tp, REGIME_CODES[opt.kind]

    axes = [Axis("l_b", "m", _logspace(2, 6, n)), Axis("sigma", "1/s", _logspace(10, 13, n))]
    meta = {"l_a": 1e3, "regime": {str(v): k.value for k, v in REGIME_CODES.items()}, "tau_p_opt": "0 when no interior minimum"}
    outputs = [("tau_ah_min", "s"), ("tau_p_opt", "s"), ("regime", "")]
    return sweep(cell, axes, outputs=outputs, threads=threads, metadata=meta)


def fig_6(cfg, threads=1):
    """Jittered heralded width at the joint source optimum, symmetric links."""
    beta = cfg["fiber"]["beta"]

    def cell(p):
        jit, length = p
        d = beta * length
        if jit == 0.0:
            opt = symmetric_full_optimum(d)
            return opt.tau_ah, opt.tau_p, opt.sigma
        opt = full_optimum_2d(d, d, jitter_a=jit, jitter_b=jit)
        width = float(tau_ah_jittered(opt.tau_p, opt.sigma, d, d, jit, jit))
        return width, opt.tau_p, opt.sigma

    axes = [Axis("jitter", "s", (0.0, 10e-12, 100e-12)), Axis("length", "m", _logspace(1, 6, cfg["sweep"]["n"]))]
    outputs = [("tau_ah_j", "s"), ("tau_p", "s"), ("sigma", "1/s")]
    return sweep(cell, axes, outputs=outputs, threads=threads)


def fig_7(cfg, threads=1):
    """Phase-matching width of BBO against the emission angle."""
    c = cfg["crystal"]
    beta = cfg["fiber"]["beta"]
    n = cfg["sweep"]["n"]

    def cell(p):
        length, width, alpha = p
        spec = CrystalSpec(length, width, alpha, c["pump_wavelength"], c["signal_wavelength"])
        est = effective_sigma(spec, detuning=c["detuning"])
        return est.sigma, est.theta

    axes = [
        Axis("crystal_length", "m", (1e-2, 1e-3)),
        Axis("mode_width", "m", (1e-5, 1e-4, 1e-3)),
        Axis("alpha", "rad", tuple(np.linspace(0.0, c["alpha_max"], n))),
    ]
    refs = {f"sigma_opt_{int(l / 1e3)}km": symmetric_full_optimum(beta * l).sigma for l in (1e3, 1e5)}
    meta = {"reference_lines": refs, "angle": "internal angle between pump and signal directions"}
    return sweep(cell, axes, outputs=[("sigma", "1/s"), ("theta", "rad")], threads=threads, metadata=meta)


SCENARIOS = {1: "fixed", 2: "pump", 3: "full"}


def _template(cfg, policy, sigma=None):
    det_a = DetectorParams(cfg["detector_a"]["jitter"], cfg["detector_a"]["dark_rate"])
    det_b = DetectorParams(cfg["detector_b"]["jitter"], cfg["detector_b"]["dark_rate"])
    return ScenarioTemplate(
        source_policy=policy,
        tau_p=cfg["source"]["tau_p"],
        sigma=sigma if sigma is not None else cfg["source"]["sigma"],
        beta=cfg["fiber"]["beta"],
        alpha_db_per_km=cfg["fiber"]["alpha"],
        detector_a=det_a,
        detector_b=det_b,
    )


def _rate_cell(template, l_a, l_b):
    scen = template.build(l_a, l_b)
    w = optimize_windows(scen)
    m = w.metrics
    return m.key_rate, m.p_exp, m.qber, w.xi_a, w.xi_b, scen.source.tau_p, scen.source.sigma


_RATE_OUTPUTS = [
    ("key_rate", "1/pair"),
    ("p_exp", ""),
    ("qber", ""),
    ("xi_a", ""),
    ("xi_b", ""),
    ("tau_p", "s"),
    ("sigma", "1/s"),
]


def _length_grid(cfg):
    return tuple(np.linspace(1e3, cfg["sweep"]["l_max"], cfg["sweep"]["n"]))


def fig_8a(cfg, threads=1):
    """Key rate for symmetric links: fixed, pump-optimised and fully optimised source."""
    templates = {k: _template(cfg, p) for k, p in SCENARIOS.items()}

    def cell(p):
        code, length = p
        return _rate_cell(templates[int(code)], length, length)

    axes = [Axis("scenario", "", tuple(SCENARIOS)), Axis("length", "m", _length_grid(cfg))]
    meta = {"scenario": {str(k): v for k, v in SCENARIOS.items()}}
    return sweep(cell, axes, outputs=_RATE_OUTPUTS, threads=threads, metadata=meta)


def fig_8b(cfg, threads=1, l_b_values=(1e3, 25e3, 50e3, 100e3)):
    """Key rate against L_A for a family of heralding-arm lengths, pump tuned for the key."""
    template = _template(cfg, "pump_key")

    def cell(p):
        l_b, l_a = p
        return _rate_cell(template, l_a, l_b)

    axes = [Axis("l_b", "m", tuple(l_b_values)), Axis("l_a", "m", _length_grid(cfg))]
    return sweep(cell, axes, outputs=_RATE_OUTPUTS, threads=threads, metadata={"source_policy": "pump_key"})


BUILDERS = {
    "3a": fig_3a,
    "3b": fig_3b,
    "4a": fig_4a,
    "4b": fig_4b,
    "5": fig_5,
    "6": fig_6,
    "7": fig_7,
    "8a": fig_8a,
    "8b": fig_8b,
}


def build_figure(fig_id, cfg, threads=1):
    if fig_id not in BUILDERS:
        raise DomainError(f"unknown figure {fig_id!r}; choose from {FIGURES}")
    return BUILDERS[fig_id](cfg, threads=threads)

