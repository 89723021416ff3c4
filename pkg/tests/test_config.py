import json

import pytest

from spdcopt.config import apply_override, default_document, load, resolve
from spdcopt.exceptions import ConfigError


def test_defaults_resolve_to_si():
    doc, cfg = load()
    assert cfg["source"]["tau_p"] == pytest.approx(1e-9)
    assert cfg["source"]["sigma"] == pytest.approx(1e12)
    assert cfg["fiber"]["beta"] == pytest.approx(-1.15e-26)
    assert cfg["links"]["l_a"] == pytest.approx(1e3)
    assert cfg["crystal"]["alpha_max"] == pytest.approx(20 * 3.141592653589793 / 180)
    assert doc == default_document()


def test_override_parses_json():
    _, cfg = load(overrides=['links.l_a={"value": 5, "unit": "km"}', "sweep.n=3", "source.policy=full"])
    assert cfg["links"]["l_a"] == 5e3 and cfg["sweep"]["n"] == 3 and cfg["source"]["policy"] == "full"


@pytest.mark.parametrize(
    "override",
    [
        "links.l_a={\"value\": 5, \"unit\": \"ps\"}",
        "links.l_a={\"value\": 5, \"unit\": \"furlong\"}",
        "links.l_c=3",
        "source.policy=sometimes",
        "sweep.n=2.5",
        "verify.suites=[\"bogus\"]",
        "noequals",
    ],
)
def test_bad_overrides(override):
    with pytest.raises(ConfigError):
        load(overrides=[override])


def test_file_merge_and_sidecar(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"source": {"sigma": {"value": 3, "unit": "GHz"}}}))
    assert load(p)[1]["source"]["sigma"] == 3e9
    side = tmp_path / "s.json"
    side.write_text(json.dumps({"tool": "spdcopt", "config": {"sweep": {"n": 7}}}))
    assert load(side)[1]["sweep"]["n"] == 7


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load(bad)
    unknown = tmp_path / "u.json"
    unknown.write_text(json.dumps({"extra": {}}))
    with pytest.raises(ConfigError):
        load(unknown)


def test_missing_field():
    doc = default_document()
    del doc["links"]["l_b"]
    with pytest.raises(ConfigError, match="missing"):
        resolve(doc)


def test_apply_override_unknown_path():
    with pytest.raises(ConfigError):
        apply_override(default_document(), "a.b=1")
