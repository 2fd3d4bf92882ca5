"""Sigmoid control-display transfer for trackpad/touch relative pointing.

Maps finger speed to a CD gain between cd_min and cd_max along a logistic
curve, then scales finger displacement (meters on the input surface) into
cursor displacement (pixels on the display). Slow finger motion gets a small
gain for fine positioning; fast motion saturates at cd_max for long jumps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .geometry import DisplayPlane

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransferParams:
    """The six-parameter speed-to-gain curve.

    gain(s) = cd_min + (cd_max - cd_min) / (1 + exp(-lambda_ * (s' - v_mid)))
    with s' the input speed clamped to [v_low_clamp, v_high_clamp] m/s.
    """

    cd_min: float = 1.0
    cd_max: float = 50.0
    lambda_: float = 8.0        # s/m, sigmoid steepness
    v_mid: float = 0.25         # m/s, inflection speed
    v_low_clamp: float = 0.01   # m/s
    v_high_clamp: float = 1.0   # m/s

    def __post_init__(self):
        if self.cd_min < 0 or self.cd_max < self.cd_min:
            raise ValueError("require 0 <= cd_min <= cd_max")
        if not (self.v_low_clamp <= self.v_mid <= self.v_high_clamp):
            raise ValueError("require v_low_clamp <= v_mid <= v_high_clamp")
        if self.lambda_ <= 0:
            raise ValueError("lambda_ must be positive")


class TransferState:
    """Per-stroke finger tracking; reset on every touch-down."""

    __slots__ = ("fx", "fy", "last_t_us", "active")

    def __init__(self):
        self.fx = 0.0
        self.fy = 0.0
        self.last_t_us = 0
        self.active = False

    def begin_stroke(self, finger, t_us: int) -> None:
        self.fx, self.fy = float(finger[0]), float(finger[1])
        self.last_t_us = t_us
        self.active = True

    def end_stroke(self) -> None:
        self.active = False


def cd_gain(params: TransferParams, speed: float) -> float:
    """CD gain for an input speed in m/s; monotone, bounded by cd_min/cd_max."""
    if speed < params.v_low_clamp:
        speed = params.v_low_clamp
    elif speed > params.v_high_clamp:
        speed = params.v_high_clamp
    return params.cd_min + (params.cd_max - params.cd_min) / (
        1.0 + math.exp(-params.lambda_ * (speed - params.v_mid)))


def displacement(state: TransferState, params: TransferParams,
                 finger, t_us: int, display: DisplayPlane):
    """Cursor delta in pixels for one finger sample of an active stroke.

    The first sample of a stroke produces (0, 0) and seeds the state. The
    gain is computed from the 2-D finger speed and applied isotropically;
    each axis is then scaled by that axis's pixels-per-meter. A repeated
    timestamp drops the event (zero delta).
    """
    fx, fy = float(finger[0]), float(finger[1])
    if not state.active:
        state.begin_stroke((fx, fy), t_us)
        return (0.0, 0.0)
    dt = (t_us - state.last_t_us) * 1e-6
    if dt <= 0.0:
        log.debug("transfer: dropped touch sample with non-advancing "
                  "timestamp %d", t_us)
        return (0.0, 0.0)
    dx = fx - state.fx
    dy = fy - state.fy
    state.fx, state.fy = fx, fy
    state.last_t_us = t_us
    if dx == 0.0 and dy == 0.0:
        return (0.0, 0.0)
    speed = math.sqrt(dx * dx + dy * dy) / dt
    g = cd_gain(params, speed)
    return (g * dx * display.px_per_m_x, g * dy * display.px_per_m_y)
