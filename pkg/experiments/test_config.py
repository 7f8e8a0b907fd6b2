# python -m pytest experiments/test_config.py
import json

import pytest

from core.config import (
    SETTINGS,
    DeviceParams,
    RunConfig,
    config_hash,
    config_schema,
    load_config,
    parse_config,
    resolve_config_path,
    save_config,
)
from core.errors import ConfigError


class TestRunConfig:
    def test_json_round_trip_is_lossless(self, baseline):
        again = RunConfig.model_validate(json.loads(json.dumps(baseline.model_dump(mode="json"))))
        assert again == baseline
        assert config_hash(again) == config_hash(baseline)

    def test_save_and_load(self, baseline, tmp_path):
        path = save_config(baseline, tmp_path / "saved.json")
        assert load_config(path) == baseline

    def test_hash_tracks_values(self, baseline):
        changed = baseline.replace(population=2e-5)
        assert config_hash(changed) != config_hash(baseline)
        assert len(config_hash(baseline)) == 64

    def test_unknown_key_rejected(self, baseline):
        data = baseline.model_dump(mode="json")
        data["device"]["T1_gf"] = 1e-5
        with pytest.raises(ConfigError) as exc:
            parse_config(data)
        assert exc.value.key == "device.T1_gf"

    def test_missing_lifetime_named(self, baseline):
        data = baseline.model_dump(mode="json")
        del data["device"]["T1_ge"]
        with pytest.raises(ConfigError) as exc:
            parse_config(data)
        assert "T1_ge" in str(exc.value)

    def test_bath_range_order(self, baseline):
        with pytest.raises(ValueError):
            baseline.replace(bath_range=(0.053, 0.037))

    def test_device_replace_revalidates(self, device):
        with pytest.raises(ValueError):
            device.replace(T1_ge=-1.0)

    def test_angular_frequencies(self, device):
        assert device.g == pytest.approx(2 * 3.141592653589793 * 280e3)
        assert device.phonon_decay == pytest.approx(1 / 112e-6)

    def test_scenario_rule_needs_band_floor(self, baseline):
        data = load_config("table2_mhz_device.json").model_dump(mode="json")
        data["scenario"]["band_floor_hz"] = None
        with pytest.raises(ConfigError):
            parse_config(data)


class TestConfigFiles:
    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "device": {\n    "T1_ge": ,\n  }\n}\n')
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert exc.value.row == 3

    def test_config_dir_lookup(self, tmp_path, monkeypatch, ideal):
        save_config(ideal, tmp_path / "custom.json")
        monkeypatch.setitem(SETTINGS, "config_dir", tmp_path)
        assert resolve_config_path("custom") == tmp_path / "custom.json"
        assert load_config("custom") == ideal

    @pytest.mark.parametrize(
        "name, has_scenario",
        [
            ("table1.json", False),
            ("table2_current.json", True),
            ("table2_next_generation.json", True),
            ("table2_mhz_device.json", True),
        ],
    )
    def test_bundled_configs(self, name, has_scenario):
        cfg = load_config(name)
        assert (cfg.scenario is not None) == has_scenario
        if has_scenario:
            assert name == f"table2_{cfg.scenario.label}.json"

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("does_not_exist.json")

    def test_schema_lists_device_fields(self):
        schema = config_schema()
        assert "DeviceParams" in schema["$defs"]
        assert set(DeviceParams.model_fields) <= set(schema["$defs"]["DeviceParams"]["properties"])
