"""Configuration file loading: display geometry, filter/transfer parameters,
technique thresholds, study design, simulator scenario, server address.

Configuration is YAML with the sections shown in configs/default.yaml; any
omitted key falls back to the built-in default, so a config file only needs
the values it changes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Optional

import yaml

from .engine import ABSOLUTE, DUAL_SPEED, HYBRID, RELATIVE, EngineParams
from .experiment import PracticeRules, StudyDesign
from .filtering import FilterParams
from .geometry import DisplayPlane
from .transfer import TransferParams

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8787


def default_display() -> DisplayPlane:
    """The tiled wall this project targets: 4.1 x 2.31 m, 7710 x 4350 px.

    Room frame: x right, y up, z toward the operator; the display surface is
    the z = 0 plane with its center 1.455 m above the floor.
    """
    return DisplayPlane.build(
        top_left=(-2.05, 2.61, 0.0),
        u_axis=(1.0, 0.0, 0.0),
        v_axis=(0.0, -1.0, 0.0),
        width_m=4.1, height_m=2.31, width_px=7710, height_px=4350)


@dataclass(frozen=True)
class Config:
    display: DisplayPlane
    filter_params: FilterParams
    transfer_hybrid: TransferParams
    transfer_relative: TransferParams
    engine_params: EngineParams
    study: StudyDesign
    simulator: dict = None    # raw `simulator` section; parsed lazily to
    host: str = DEFAULT_HOST  # avoid a config<->simulator import cycle
    port: int = DEFAULT_PORT

    def transfer_for(self, technique: str) -> TransferParams:
        return self.transfer_relative if technique == RELATIVE else self.transfer_hybrid

    def scenario(self, design=None, rng_seed: int = 0, **overrides):
        """Build a SimScenario from the `simulator` config section."""
        from .simulator import build_scenario

        return build_scenario(self.simulator or {}, design or self.study,
                              rng_seed=rng_seed, **overrides)


def default_config() -> Config:
    return Config(
        display=default_display(),
        filter_params=FilterParams(),
        transfer_hybrid=TransferParams(cd_max=50.0),
        transfer_relative=TransferParams(cd_max=200.0),
        engine_params=EngineParams(),
        study=StudyDesign(),
    )


def _display_from(section: dict) -> DisplayPlane:
    base = default_display()
    if not section:
        return base
    if "top_left" in section or "u_axis" in section or "v_axis" in section:
        return DisplayPlane.build(
            top_left=tuple(section.get("top_left", base.top_left)),
            u_axis=tuple(section.get("u_axis", base.u_axis)),
            v_axis=tuple(section.get("v_axis", base.v_axis)),
            width_m=section.get("width_m", base.width_m),
            height_m=section.get("height_m", base.height_m),
            width_px=section.get("width_px", base.width_px),
            height_px=section.get("height_px", base.height_px))
    # wall on the z = 0 plane, positioned by its center
    width_m = float(section.get("width_m", base.width_m))
    height_m = float(section.get("height_m", base.height_m))
    cx, cy, cz = section.get("center", (0.0, 1.455, 0.0))
    return DisplayPlane.build(
        top_left=(cx - width_m / 2.0, cy + height_m / 2.0, cz),
        u_axis=(1.0, 0.0, 0.0), v_axis=(0.0, -1.0, 0.0),
        width_m=width_m, height_m=height_m,
        width_px=section.get("width_px", base.width_px),
        height_px=section.get("height_px", base.height_px))


def _transfer_from(section: dict, base: TransferParams) -> TransferParams:
    fields = {}
    for key in ("cd_min", "cd_max", "v_mid", "v_low_clamp", "v_high_clamp"):
        if key in section:
            fields[key] = float(section[key])
    if "lambda" in section:
        fields["lambda_"] = float(section["lambda"])
    return replace(base, **fields) if fields else base


def _engine_from(section: dict, base: EngineParams) -> EngineParams:
    fields = {}
    for key in ("clutch_ms", "snap_tau_ms", "snap_threshold_px",
                "tap_window_ms", "slow_gain", "tap_slop_m"):
        if key in section:
            fields[key] = float(section[key])
    for key in ("snap_instant", "trigger_clicks"):
        if key in section:
            fields[key] = bool(section[key])
    return replace(base, **fields) if fields else base


def _study_from(section: dict, base: StudyDesign) -> StudyDesign:
    fields = {}
    if "techniques" in section:
        fields["techniques"] = tuple(section["techniques"])
    if "widths" in section:
        fields["widths"] = tuple(float(w) for w in section["widths"])
    if "amplitudes" in section:
        fields["amplitudes"] = tuple(float(a) for a in section["amplitudes"])
    for key in ("sets_per_condition", "participant_index"):
        if key in section:
            fields[key] = int(section[key])
    if "technique_order_seed" in section:
        seed = section["technique_order_seed"]
        fields["technique_order_seed"] = None if seed is None else int(seed)
    if "practice" in section:
        p = section["practice"]
        fields["practice"] = PracticeRules(
            amplitude_px=float(p.get("amplitude_px", 3000.0)),
            widths_px=tuple(float(w) for w in p.get("widths_px", (25.0, 50.0))),
            accuracy_threshold=float(p.get("accuracy_threshold", 0.90)),
            window_sets=int(p.get("window_sets", 2)))
    return replace(base, **fields) if fields else base


def config_from_dict(data: dict) -> Config:
    base = default_config()
    technique_section = data.get("technique", {})
    engine_params = _engine_from(technique_section.get("common", {}),
                                 base.engine_params)
    # flat per-technique threshold sections merge onto the common ones
    for tech in (ABSOLUTE, RELATIVE, HYBRID, DUAL_SPEED):
        engine_params = _engine_from(technique_section.get(tech, {}), engine_params)

    filter_section = data.get("filter", {})
    fp = FilterParams(
        f_min=float(filter_section.get("f_min", base.filter_params.f_min)),
        beta=float(filter_section.get("beta", base.filter_params.beta)),
        f_deriv=float(filter_section.get("f_deriv", base.filter_params.f_deriv)))

    transfer_section = data.get("transfer", {})
    server_section = data.get("server", {})
    return Config(
        display=_display_from(data.get("display", {})),
        filter_params=fp,
        transfer_hybrid=_transfer_from(transfer_section.get("hybrid", {}),
                                       base.transfer_hybrid),
        transfer_relative=_transfer_from(transfer_section.get("relative", {}),
                                         base.transfer_relative),
        engine_params=engine_params,
        study=_study_from(data.get("study", {}), base.study),
        simulator=data.get("simulator") or None,
        host=server_section.get("host", base.host),
        port=int(server_section.get("port", base.port)))


def load_config(path: Optional[str] = None) -> Config:
    if path is None:
        return default_config()
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    return config_from_dict(data)


def server_address(config: Config, host_flag: Optional[str] = None,
                   port_flag: Optional[int] = None):
    """Resolve host/port: CLI flag beats FARPOINT_HOST/FARPOINT_PORT beats config."""
    host = host_flag or os.environ.get("FARPOINT_HOST") or config.host
    port = port_flag if port_flag is not None else \
        int(os.environ.get("FARPOINT_PORT", config.port))
    return host, port
