"""Scenario configuration: JSON with unit-tagged quantities, converted to SI.

Every physical quantity is written as ``{"value": <number>, "unit": <str>}``.
A user file is merged over the bundled defaults, then ``--override`` edits
are applied, then the whole document is validated.  Unknown keys, unknown
units and units of the wrong dimension are rejected with :class:`ConfigError`.
"""

import copy
import json
import math
from importlib import resources

from .exceptions import ConfigError

UNITS = {
    "time": {"s": 1.0, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "rate": {"Hz": 1.0, "kHz": 1e3, "GHz": 1e9, "THz": 1e12},
    "attenuation": {"dB/km": 1.0},
    "gvd": {"s²/m": 1.0, "s^2/m": 1.0},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
}

# section -> field -> kind; kinds are unit dimensions or plain types
SCHEMA = {
    "source": {"tau_p": "time", "sigma": "rate", "policy": "str"},
    "links": {"l_a": "length", "l_b": "length"},
    "fiber": {"beta": "gvd", "alpha": "attenuation"},
    "detector_a": {"jitter": "time", "dark_rate": "rate"},
    "detector_b": {"jitter": "time", "dark_rate": "rate"},
    "crystal": {
        "length": "length",
        "mode_width": "length",
        "emission_angle": "angle",
        "pump_wavelength": "length",
        "signal_wavelength": "length",
        "alpha_max": "angle",
        "detuning": "str",
    },
    "qkd": {
        "arm": "str",
        "other_length": "length?",
        "xi_a": "float?",
        "xi_b": "float?",
        "l_b_policy": "str",
        "pair_rate": "rate?",
    },
    "sweep": {"n": "int", "l_max": "length"},
    "oracle": {"n_points": "int", "n_output": "int", "span_factor": "float"},
    "verify": {
        "suites": "list",
        "n_oracle": "int",
        "n_jitter": "int",
        "n_classify": "int",
        "n_montecarlo": "int",
        "mc_trials": "int",
        "seed": "int",
        "perturb": "float",
    },
}

CHOICES = {
    ("source", "policy"): ("fixed", "pump", "full", "pump_key"),
    ("crystal", "detuning"): ("signal", "anticorrelated"),
    ("qkd", "arm"): ("A", "B", "both"),
    ("qkd", "l_b_policy"): ("fixed", "equal", "optimized"),
}
VERIFY_SUITES = ("oracle", "jitter", "classification", "montecarlo")


def default_document():
    text = resources.files("spdcopt").joinpath("data/default_scenario.json").read_text()
    return json.loads(text)


def _merge(base, update, path=""):
    for key, val in update.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown field {where!r}")
        if isinstance(base[key], dict) and isinstance(val, dict) and "unit" not in base[key]:
            _merge(base[key], val, where)
        else:
            base[key] = val
    return base


def _parse_scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(doc, assignment):
    """Apply one ``dotted.path=value`` edit in place; the value is read as JSON if possible."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    path, text = assignment.split("=", 1)
    keys = path.strip().split(".")
    node = doc
    for i, key in enumerate(keys[:-1]):
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"unknown field {'.'.join(keys[: i + 1])!r}")
        node = node[key]
    last = keys[-1]
    if not isinstance(node, dict) or last not in node:
        raise ConfigError(f"unknown field {path!r}")
    node[last] = _parse_scalar(text)
    return doc


def _quantity(where, kind, val):
    if not isinstance(val, dict) or set(val) != {"value", "unit"}:
        raise ConfigError(f"{where}: expected {{'value': ..., 'unit': ...}}, got {val!r}")
    unit, num = val["unit"], val["value"]
    table = UNITS[kind]
    if unit not in table:
        raise ConfigError(f"{where}: unit {unit!r} is not a {kind} unit; allowed: {sorted(table)}")
    if isinstance(num, bool) or not isinstance(num, (int, float)) or not math.isfinite(num):
        raise ConfigError(f"{where}: value must be a finite number, got {num!r}")
    return float(num) * table[unit]


def _field(section, name, kind, val):
    where = f"{section}.{name}"
    optional = kind.endswith("?")
    kind = kind.rstrip("?")
    if val is None:
        if optional:
            return None
        raise ConfigError(f"{where} is required")
    if kind in UNITS:
        return _quantity(where, kind, val)
    if kind == "int":
        if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
            raise ConfigError(f"{where}: expected an integer, got {val!r}")
        return int(val)
    if kind == "float":
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ConfigError(f"{where}: expected a number, got {val!r}")
        return float(val)
    if kind == "str":
        choices = CHOICES.get((section, name))
        if not isinstance(val, str) or (choices and val not in choices):
            raise ConfigError(f"{where}: expected one of {choices}, got {val!r}")
        return val
    if kind == "list":
        if not isinstance(val, list) or not all(v in VERIFY_SUITES for v in val):
            raise ConfigError(f"{where}: expected a list drawn from {VERIFY_SUITES}, got {val!r}")
        return list(val)
    raise AssertionError(kind)


def resolve(doc):
    """Validate a full document and return the same tree with SI floats."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    out = {}
    for section, fields in doc.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section {section!r}")
        if not isinstance(fields, dict):
            raise ConfigError(f"section {section!r} must be an object")
        out[section] = {}
        for name, val in fields.items():
            if name not in SCHEMA[section]:
                raise ConfigError(f"unknown field {section}.{name!r}")
            out[section][name] = _field(section, name, SCHEMA[section][name], val)
    missing = [f"{s}.{n}" for s, fs in SCHEMA.items() for n in fs if n not in out.get(s, {})]
    if missing:
        raise ConfigError(f"missing fields: {missing}")
    return out


def load(path=None, overrides=()):
    """Defaults, merged with the file at ``path`` and the overrides.

    A JSON sidecar written by the ``figure`` command is accepted as well; its
    ``config`` member is used.

    Returns
    -------
    (document, resolved) : tuple of dict
        The merged unit-tagged document and its SI form.
    """
    doc = default_document()
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if isinstance(user, dict) and "config" in user and "tool" in user:
            user = user["config"]
        if not isinstance(user, dict):
            raise ConfigError("configuration must be a JSON object")
        _merge(doc, copy.deepcopy(user))
    for item in overrides:
        apply_override(doc, item)
    return doc, resolve(doc)
