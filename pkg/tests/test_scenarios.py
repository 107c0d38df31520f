import json

import pytest

from beamkey.scenarios import (
    ConfigError,
    ScenarioConfig,
    default_config,
    emit_config,
    parse_config,
)


def test_round_trip_identity():
    for kind in ("exp1", "exp2", "exp3", "platoon", "rate-calc", "sweep-demo"):
        cfg = default_config(kind)
        assert parse_config(emit_config(cfg)) == cfg


def test_round_trip_through_json_text():
    cfg = default_config("exp2")
    text = json.dumps(emit_config(cfg))
    assert parse_config(text) == cfg


def test_toml_parsing(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text(
        "\n".join(
            [
                'kind = "exp1"',
                "seed = 7",
                "trials = 5",
                "[geometry]",
                "d = 3.5",
                "theta_deg = 45.0",
            ]
        )
    )
    cfg = parse_config(path)
    assert cfg.kind == "exp1"
    assert cfg.seed == 7
    assert cfg.geometry.d == 3.5


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError):
        parse_config({"kind": "exp1", "bogus": 1})


def test_unknown_section_key_rejected():
    with pytest.raises(ConfigError):
        parse_config({"kind": "exp1", "geometry": {"dd": 2.0}})


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError):
        parse_config({"kind": "exp9"})


def test_schema_version_enforced():
    with pytest.raises(ConfigError):
        parse_config({"kind": "exp1", "schema_version": 99})


def test_missing_kind_rejected():
    with pytest.raises(ConfigError):
        parse_config({"seed": 1})


def test_missing_file_is_io_error():
    with pytest.raises(ConfigError) as err:
        parse_config("/nonexistent/thing.toml")
    assert err.value.category == "io"


def test_code_needs_rates_or_thresholds():
    with pytest.raises(ConfigError):
        parse_config(
            {"kind": "exp1", "code": {"beacon_rate_bps": None, "r_max_bps": None}}
        )


def test_exp3_default_ships_deployment():
    cfg = default_config("exp3")
    assert len(cfg.geometry.stations) == 3
    assert len(cfg.geometry.triangle) == 3
    assert cfg.geometry.mobile_positions


def test_trials_validated():
    with pytest.raises(ConfigError):
        ScenarioConfig(kind="exp1", trials=0)
