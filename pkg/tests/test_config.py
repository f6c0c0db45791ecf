import json

import pytest
from src.cascade_sim.config import config_digest, load_config, parse_config
from src.cascade_sim.exceptions import ConfigError
from src.cascade_sim.model import CascadeParams

from .utils_test import fig_params, unequal_params, write_config


def sub_doc(**overrides):
    doc = {"g": 5, "kappa": 0.9, "kappa_loss": 0.1, "gamma": 0.2, "delta": 0.1}
    doc.update(overrides)
    return doc


def test_parse_figure_document():
    p = parse_config({"a": sub_doc(), "b": sub_doc(), "phi": 0})
    assert p == fig_params()


def test_phi_defaults_to_zero():
    assert parse_config({"a": sub_doc(), "b": sub_doc()}).phi == 0.0


def test_roundtrip_through_file(tmp_path):
    p = unequal_params()
    assert load_config(write_config(tmp_path / "p.json", p)) == p


def test_negative_detuning_accepted():
    assert parse_config({"a": sub_doc(delta=-2), "b": sub_doc()}).a.delta == -2.0


@pytest.mark.parametrize(
    "doc,prefix",
    [
        ([], "<root>:"),
        ({"a": sub_doc()}, "b: missing"),
        ({"a": sub_doc(), "b": sub_doc(), "psi": 1}, "psi: unknown key"),
        ({"a": sub_doc(), "b": 3}, "b: expected an object"),
        ({"a": sub_doc(kappa=-1), "b": sub_doc()}, "a.kappa: must be >= 0"),
        ({"a": sub_doc(), "b": sub_doc(g="5")}, "b.g: expected a number"),
        ({"a": sub_doc(), "b": sub_doc(gamma=True)}, "b.gamma: expected a number"),
        ({"a": sub_doc(), "b": sub_doc(extra=1)}, "b.extra: unknown key"),
        ({"a": sub_doc(), "b": sub_doc(), "phi": None}, "phi: expected a number"),
        ({"a": sub_doc(g=float("inf")), "b": sub_doc()}, "a.g: must be finite"),
    ],
)
def test_bad_documents(doc, prefix):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(doc)
    assert excinfo.value.message.startswith(prefix)


def test_missing_subsystem_key():
    doc = sub_doc()
    del doc["kappa"]
    with pytest.raises(ConfigError) as excinfo:
        parse_config({"a": doc, "b": sub_doc()})
    assert excinfo.value.message == "a.kappa: missing"


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        load_config(str(tmp_path / "absent.json"))
    assert excinfo.value.message.startswith("<file>:")


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"a": ', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_config(str(path))
    assert "invalid JSON" in excinfo.value.message


def test_digest_ignores_formatting(tmp_path):
    path_1 = tmp_path / "one.json"
    path_2 = tmp_path / "two.json"
    doc = {"a": sub_doc(), "b": sub_doc(), "phi": 0.0}
    path_1.write_text(json.dumps(doc), encoding="utf-8")
    path_2.write_text(json.dumps(doc, indent=4, sort_keys=True), encoding="utf-8")
    digest = config_digest(load_config(str(path_1)))
    assert digest == config_digest(load_config(str(path_2)))
    assert len(digest) == 64


def test_digest_follows_parameters():
    assert config_digest(fig_params()) != config_digest(fig_params(phi=1.0))
    assert config_digest(CascadeParams()) == config_digest(CascadeParams(phi=0.0))
