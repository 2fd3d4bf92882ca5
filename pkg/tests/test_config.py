import pytest

from farpoint.config import (config_from_dict, default_config, load_config,
                             server_address)


def test_default_display_matches_wall_dimensions():
    d = default_config().display
    assert (d.width_m, d.height_m) == (4.1, 2.31)
    assert (d.width_px, d.height_px) == (7710, 4350)
    assert d.px_per_m_x == pytest.approx(1880.49, abs=0.01)
    assert d.px_per_m_y == pytest.approx(1883.12, abs=0.01)


def test_transfer_defaults_by_technique():
    c = default_config()
    assert c.transfer_for("hybrid").cd_max == 50.0
    assert c.transfer_for("relative").cd_max == 200.0
    assert c.transfer_for("absolute").cd_max == 50.0


def test_yaml_overrides(tmp_path):
    cfg = tmp_path / "conf.yaml"
    cfg.write_text("""
display:
  width_m: 2.0
  height_m: 1.0
  width_px: 3840
  height_px: 1920
  center: [0.0, 1.2, 0.0]
filter:
  f_min: 0.5
transfer:
  hybrid: {cd_max: 40, lambda: 10}
  relative: {cd_max: 150}
technique:
  common: {snap_tau_ms: 80}
  hybrid: {clutch_ms: 500}
study:
  widths: [20, 40]
  amplitudes: [800, 1600]
  sets_per_condition: 2
server:
  port: 9100
""")
    c = load_config(str(cfg))
    assert c.display.width_px == 3840
    assert c.display.top_left == (-1.0, 1.7, 0.0)
    assert c.filter_params.f_min == 0.5
    assert c.filter_params.beta == 0.01          # untouched default
    assert c.transfer_hybrid.cd_max == 40.0
    assert c.transfer_hybrid.lambda_ == 10.0
    assert c.transfer_relative.cd_max == 150.0
    assert c.engine_params.snap_tau_ms == 80.0
    assert c.engine_params.clutch_ms == 500.0
    assert c.study.widths == (20.0, 40.0)
    assert c.port == 9100


def test_empty_config_is_default(tmp_path):
    cfg = tmp_path / "empty.yaml"
    cfg.write_text("")
    assert load_config(str(cfg)) == default_config()


def test_server_address_resolution(monkeypatch):
    c = default_config()
    assert server_address(c) == (c.host, c.port)
    monkeypatch.setenv("FARPOINT_HOST", "10.0.0.5")
    monkeypatch.setenv("FARPOINT_PORT", "9999")
    assert server_address(c) == ("10.0.0.5", 9999)
    assert server_address(c, "1.2.3.4", 80) == ("1.2.3.4", 80)


def test_simulator_scenario_section(tmp_path):
    cfg = tmp_path / "conf.yaml"
    cfg.write_text("""
simulator:
  stand_position: [0.5, 1.4, 3.0]
  pose_rate_hz: 120
  human:
    tremor_rms_deg: 0.2
    movement:
      submove_base_ms: 200.0
""")
    c = load_config(str(cfg))
    sc = c.scenario(rng_seed=9)
    assert sc.stand_position == (0.5, 1.4, 3.0)
    assert sc.pose_rate_hz == 120
    assert sc.human.tremor_rms_deg == 0.2
    assert sc.human.tremor_band_hz == (8.0, 12.0)   # untouched default
    assert sc.human.movement.submove_base_ms == 200.0
    assert sc.human.rng_seed == 9
    assert sc.design == c.study


def test_simulator_section_rejects_unknown_keys():
    from farpoint.simulator import ScenarioError, build_scenario

    c = default_config()
    with pytest.raises(ScenarioError):
        build_scenario({"human": {"tremor_sigma": 1.0}}, c.study)
    with pytest.raises(ScenarioError):
        build_scenario({"pose_hz": 90}, c.study)


def test_technique_sections_merge_onto_common():
    c = config_from_dict({"technique": {
        "common": {"trigger_clicks": True},
        "dual_speed": {"slow_gain": 0.25},
    }})
    assert c.engine_params.trigger_clicks is True
    assert c.engine_params.slow_gain == 0.25
