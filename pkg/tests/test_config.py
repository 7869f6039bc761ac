import pytest
import yaml

from forcemotion.config import (
    ConfigInvalid,
    apply_overrides,
    load_config,
    preset_config,
    scenario_from_config,
    to_yaml,
    validate_config,
)
from forcemotion.fuzzy import Label

MINIMAL = {"controller": "pi", "setpoint": {"x": 0.0, "z": 10.0}}


class TestValidation:
    def test_minimal_config_gets_defaults(self):
        cfg = validate_config(dict(MINIMAL))
        assert cfg["dt"] == 0.01
        assert cfg["arm"]["l1"] == 0.5
        assert cfg["environment"]["obstacles"] == []
        assert cfg["gains"]["pi"]["z"]["ki"] > 0.0

    def test_missing_required_keys(self):
        with pytest.raises(ConfigInvalid, match="controller"):
            validate_config({"setpoint": {"x": 0, "z": 10}})
        with pytest.raises(ConfigInvalid, match="setpoint.z"):
            validate_config({"controller": "pi", "setpoint": {"x": 0}})

    def test_unknown_keys_rejected_at_any_level(self):
        with pytest.raises(ConfigInvalid, match="unknown config key: dtt"):
            validate_config({**MINIMAL, "dtt": 1})
        with pytest.raises(ConfigInvalid, match="arm.l3"):
            validate_config({**MINIMAL, "arm": {"l3": 1.0}})
        with pytest.raises(ConfigInvalid, match="gains.pi.z.kx"):
            validate_config({**MINIMAL, "gains": {"pi": {"z": {"kx": 1.0}}}})

    def test_type_errors_are_named(self):
        with pytest.raises(ConfigInvalid, match="dt: expected a number"):
            validate_config({**MINIMAL, "dt": "fast"})
        with pytest.raises(ConfigInvalid, match="selection.z: expected a boolean"):
            validate_config({**MINIMAL, "selection": {"z": 1}})
        with pytest.raises(ConfigInvalid, match="setpoint.z: expected a number"):
            validate_config({"controller": "pi", "setpoint": {"x": 0, "z": "many"}})

    def test_obstacle_schema(self):
        cfg = validate_config(
            {
                **MINIMAL,
                "environment": {
                    "obstacles": [{"type": "rough_surface", "height_base": 0.25}]
                },
            }
        )
        assert cfg["environment"]["obstacles"][0]["stiffness"] == 10_000.0
        with pytest.raises(ConfigInvalid, match=r"obstacles\[0\].type"):
            validate_config(
                {**MINIMAL, "environment": {"obstacles": [{"type": "sphere"}]}}
            )
        with pytest.raises(ConfigInvalid, match=r"obstacles\[0\].height_base"):
            validate_config(
                {**MINIMAL, "environment": {"obstacles": [{"type": "rough_surface"}]}}
            )

    def test_bad_scenario_values_surface_as_config_errors(self):
        cfg = validate_config({**MINIMAL, "duration": -1.0})
        with pytest.raises(ConfigInvalid):
            scenario_from_config(cfg)
        cfg = validate_config({**MINIMAL, "path": [{"t": 0.0, "x": 5.0, "z": 0.0}]})
        with pytest.raises(ConfigInvalid, match="unreachable"):
            scenario_from_config(cfg)


class TestOverrides:
    def test_dotted_paths_and_yaml_values(self):
        raw = apply_overrides(dict(MINIMAL), ["dt=0.005", "selection.x=false"])
        cfg = validate_config(raw)
        assert cfg["dt"] == 0.005
        assert cfg["selection"]["x"] is False

    def test_list_values(self):
        raw = apply_overrides(dict(MINIMAL), ["tuner.grid.kp=[1.0e-4, 2.0e-4]"])
        cfg = validate_config(raw)
        assert cfg["tuner"]["grid"]["kp"] == [1e-4, 2e-4]

    def test_malformed_override(self):
        with pytest.raises(ConfigInvalid, match="key=value"):
            apply_overrides(dict(MINIMAL), ["dt"])


class TestPresetsAndFiles:
    def test_preset_config_validates_and_builds(self):
        for name in ("exp1", "exp2", "exp3"):
            cfg = validate_config(preset_config(name))
            for kind in ("pi", "fuzzy"):
                scenario = scenario_from_config(cfg, controller=kind)
                assert scenario.name == name
                assert scenario.controller_kind == kind

    def test_load_config_round_trip(self, tmp_path):
        path = tmp_path / "exp2.yaml"
        path.write_text(to_yaml(preset_config("exp2")))
        cfg = load_config(path)
        assert cfg == validate_config(yaml.safe_load(path.read_text()))

    def test_load_config_errors(self, tmp_path):
        with pytest.raises(ConfigInvalid, match="not found"):
            load_config(tmp_path / "missing.yaml")
        bad = tmp_path / "bad.yaml"
        bad.write_text("controller: [unbalanced")
        with pytest.raises(ConfigInvalid, match="not valid YAML"):
            load_config(bad)

    def test_custom_rule_file_is_wired_through(self, tmp_path):
        rules = tmp_path / "all_zr.txt"
        rules.write_text("zr zr zr zr zr zr zr\n" * 7)
        cfg = validate_config({**MINIMAL, "rule_file": str(rules)})
        scenario = scenario_from_config(cfg)
        assert scenario.rules.lookup(Label.PL, Label.PL) is Label.ZR

    def test_missing_rule_file_is_config_error(self):
        cfg = validate_config({**MINIMAL, "rule_file": "/nonexistent/rules.txt"})
        with pytest.raises(ConfigInvalid):
            scenario_from_config(cfg)

    def test_seed_derivation(self):
        cfg = validate_config({**MINIMAL, "seed": 99})
        scenario = scenario_from_config(cfg)
        assert scenario.environment.seed == 99
        assert scenario.sensor.seed == 100
        pinned = validate_config(
            {**MINIMAL, "seed": 99, "environment": {"seed": 7}, "sensor": {"seed": 8}}
        )
        scenario = scenario_from_config(pinned)
        assert scenario.environment.seed == 7
        assert scenario.sensor.seed == 8
