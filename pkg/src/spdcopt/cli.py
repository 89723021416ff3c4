"""Command-line front end.

Exit codes: 0 ok, 2 configuration error, 3 domain or numerical error,
4 I/O error, 5 verification failure.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from importlib import metadata
from pathlib import Path

from . import config as cfgmod
from .analytic import classify_pump_regime, optimal_pump_fixed_crystal, symmetric_full_optimum, tau_a_low
from .crystal import CrystalSpec, effective_sigma
from .exceptions import ConfigError, SpdcOptError
from .figures import FIGURES, build_figure
from .figures import _template as template_from_config
from .numeric import full_optimum_2d
from .oracle import GridSpec
from .qkd import QkdScenario, key_rate, max_security_distance, optimize_windows
from .temporal import (
    heralding_jitter_weight,
    sigma_to_bandwidth,
    tau_heralded,
    tau_heralded_jittered,
    tau_unheralded,
    tau_unheralded_jittered,
)
from . import verification

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO, EXIT_VERIFY = 0, 2, 3, 4, 5

PROVENANCE = {
    "beta": "-1.15e-26 s^2/m, standard single-mode fibre at 1550 nm",
    "alpha": "0.2 dB/km, standard single-mode fibre",
    "dark_rate": "1 kHz per detector",
    "sigma_unit": "phase-matching width in s^-1; Hz-family units scale by powers of ten only",
}


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt(x):
    """Shortest round-trip decimal for floats."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if hasattr(x, "value") and hasattr(x, "name"):  # enums
        return x.value
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _clean(obj):
    """Replace non-finite floats so reports stay valid JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _links(cfg):
    beta = cfg["fiber"]["beta"]
    return beta * cfg["links"]["l_a"], beta * cfg["links"]["l_b"]


# -- commands --------------------------------------------------------------------


def cmd_width(cfg, args):
    t = template_from_config(cfg, cfg["source"]["policy"])
    l_a, l_b = cfg["links"]["l_a"], cfg["links"]["l_b"]
    src = t.source_for(l_a, l_b)
    d_a, d_b = _links(cfg)
    ja, jb = cfg["detector_a"]["jitter"], cfg["detector_b"]["jitter"]
    return {
        "source": {"tau_p": src.tau_p, "sigma": src.sigma, "policy": cfg["source"]["policy"]},
        "bandwidth_m": sigma_to_bandwidth(src.sigma, cfg["crystal"]["signal_wavelength"]),
        "d_a": d_a,
        "d_b": d_b,
        "tau_a": tau_unheralded(src, d_a),
        "tau_ah": tau_heralded(src, d_a, d_b),
        "tau_a_jittered": tau_unheralded_jittered(src, d_a, ja),
        "tau_ah_jittered": tau_heralded_jittered(src, d_a, d_b, ja, jb),
        "jitter_weight": heralding_jitter_weight(src, d_a, d_b),
    }


def cmd_optimize(cfg, args):
    d_a, d_b = _links(cfg)
    sigma = cfg["source"]["sigma"]
    report = {"d_a": d_a, "d_b": d_b, "sigma": sigma}
    if d_a < 0 and d_b < 0:
        opt = optimal_pump_fixed_crystal(d_a, d_b, sigma)
        report["pump"] = {
            "regime": classify_pump_regime(d_a, d_b, sigma).value,
            "tau_p_star": opt.tau_p_star,
            "tau_ah": opt.tau_ah_at_optimum,
        }
        tp_low, tau_low = tau_a_low(d_a, sigma)
        report["unheralded"] = {"tau_p_star": tp_low, "tau_a": tau_low}
    ja, jb = cfg["detector_a"]["jitter"], cfg["detector_b"]["jitter"]
    full = full_optimum_2d(d_a, d_b, jitter_a=ja, jitter_b=jb)
    report["full_numeric"] = {
        "tau_p": full.tau_p,
        "sigma": full.sigma,
        "tau_ah": full.tau_ah,
        "boundary_hit": full.boundary_hit,
    }
    if d_a == d_b and d_a < 0 and ja == 0 and jb == 0:
        sym = symmetric_full_optimum(d_a)
        report["full_analytic"] = {"tau_p": sym.tau_p, "sigma": sym.sigma, "tau_ah": sym.tau_ah}
        report["agreement"] = {
            k: abs(getattr(full, k) / getattr(sym, k) - 1.0) for k in ("tau_p", "sigma", "tau_ah")
        }
    return report


def cmd_crystal(cfg, args):
    c = cfg["crystal"]
    spec = CrystalSpec(c["length"], c["mode_width"], c["emission_angle"], c["pump_wavelength"], c["signal_wavelength"])
    est = effective_sigma(spec, detuning=c["detuning"])
    return {
        "theta_rad": est.theta,
        "theta_deg": math.degrees(est.theta),
        "sigma": est.sigma,
        "bandwidth_m": sigma_to_bandwidth(est.sigma, c["signal_wavelength"]),
        "delta_k": est.delta_k,
        "delta_omega": est.delta_omega,
    }


def cmd_qkd_rate(cfg, args):
    t = template_from_config(cfg, cfg["source"]["policy"])
    scen = t.build(cfg["links"]["l_a"], cfg["links"]["l_b"])
    q = cfg["qkd"]
    if q["xi_a"] is not None and q["xi_b"] is not None:
        m = key_rate(scen, q["xi_a"], q["xi_b"])
    else:
        m = optimize_windows(scen).metrics
    report = _scenario_report(scen)
    report.update(
        p_exp=m.p_exp, qber=m.qber, key_rate=m.key_rate, xi_a=m.xi_a, xi_b=m.xi_b, flags=sorted(m.flags)
    )
    if q["pair_rate"] is not None:
        report["key_rate_per_s"] = m.key_rate * q["pair_rate"]
    return report


def _scenario_report(scen: QkdScenario):
    return {"source": {"tau_p": scen.source.tau_p, "sigma": scen.source.sigma}}


def cmd_qkd_maxdist(cfg, args):
    t = template_from_config(cfg, cfg["source"]["policy"])
    q = cfg["qkd"]
    dist = max_security_distance(t, q["arm"], q["other_length"])
    return {"arm": q["arm"], "other_length": q["other_length"], "policy": cfg["source"]["policy"], "max_distance_m": dist}


def _grid(cfg):
    o = cfg["oracle"]
    return GridSpec(n_points=o["n_points"], n_output=o["n_output"], span_factor=o["span_factor"])


def cmd_verify(cfg, args):
    v = cfg["verify"]
    grid = _grid(cfg)
    runners = {
        "oracle": lambda: verification.oracle_suite(v["n_oracle"], v["seed"], grid, perturb=v["perturb"]),
        "jitter": lambda: verification.jitter_suite(v["n_jitter"], v["seed"] + 1, grid),
        "classification": lambda: verification.classification_suite(v["n_classify"], v["seed"]),
        "montecarlo": lambda: verification.montecarlo_suite(v["n_montecarlo"], v["mc_trials"], v["seed"]),
    }
    reports = []
    for name in v["suites"]:
        rep = runners[name]()
        print(rep.line(), file=sys.stderr)
        if not rep.passed:
            for d in rep.details:
                if isinstance(d, str):
                    print(f"  {d}", file=sys.stderr)
        reports.append({"suite": rep.name, "passed": rep.passed, "cases": rep.n_cases, "worst": rep.worst, "tolerance": rep.tolerance})
    return {"suites": reports, "passed": all(r["passed"] for r in reports)}


def write_figure(fig_id, doc, cfg, out_dir, threads):
    """Write ``fig_<id>.csv`` and its JSON sidecar; returns both paths."""
    res = build_figure(fig_id, cfg, threads=threads)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(res.header())
    for row in res.rows():
        writer.writerow([_fmt(float(x)) for x in row])
    text = buf.getvalue()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"fig_{fig_id}.csv"
    side_path = out / f"fig_{fig_id}.json"
    csv_path.write_text(text)
    sidecar = {
        "tool": "spdcopt",
        "version": _version(),
        "command": "figure",
        "figure": fig_id,
        "config": doc,
        "csv": csv_path.name,
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
        "metadata": _clean(res.metadata),
        "failures": {str(k): v for k, v in sorted(res.failures.items())},
        "provenance": PROVENANCE,
    }
    side_path.write_text(_dump(sidecar) + "\n")
    return csv_path, side_path


COMMANDS = {
    "width": cmd_width,
    "optimize": cmd_optimize,
    "crystal-sigma": cmd_crystal,
    "qkd-rate": cmd_qkd_rate,
    "qkd-maxdist": cmd_qkd_maxdist,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="spdcopt", description="Photon-pair source optimisation for dispersive links.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON (or a figure sidecar)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE", help="dotted-path edit, value parsed as JSON")
    common.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    fig = sub.add_parser("figure", parents=[common])
    fig.add_argument("fig_id", choices=FIGURES)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, cfg = cfgmod.load(args.config, args.override)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("config error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "figure":
            paths = write_figure(args.fig_id, doc, cfg, args.out or ".", args.threads)
            print("\n".join(str(p) for p in paths))
            return EXIT_OK
        report = _clean(COMMANDS[args.command](cfg, args))
        text = _dump(report)
        print(text)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{args.command}.json").write_text(text + "\n")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpdcOptError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "verify" and not report["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
