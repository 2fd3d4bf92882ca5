"""Per-session cursor engine: technique state machines over input events.

Four techniques share one event vocabulary (poses, trackpad touches, button
edges) and one output shape (cursor position, optional click, mode flag):

* absolute   - cursor follows the filtered ray/display intersection; the
               trackpad press clicks.
* relative   - cursor moves by transfer-function deltas of the finger; a
               quick short tap clicks. Poses are ignored entirely.
* hybrid     - absolute until the trackpad is touched; then relative via the
               finger, with pose motion decoupled from the cursor. Lifting
               the finger arms a clutch timer; re-touching within it keeps
               clutching, expiry snaps the cursor back to the live absolute
               location.
* dual_speed - touching the trackpad anchors the cursor and enters a slow
               mode where it moves a fixed fraction of the absolute motion;
               release snaps back to the absolute location.

The engine is deterministic: outputs are a pure function of the initial
state, the ordered event stream, and the advance_time samples. One instance
per session; events must be fed in timestamp order by a single consumer.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .filtering import FilterParams, FilterState, filter_step
from .geometry import DevicePose, DisplayPlane, PixelPoint, extract_pose, intersect
from .transfer import TransferParams, TransferState, displacement

log = logging.getLogger(__name__)

ABSOLUTE = "absolute"
RELATIVE = "relative"
HYBRID = "hybrid"
DUAL_SPEED = "dual_speed"
TECHNIQUES = (ABSOLUTE, RELATIVE, HYBRID, DUAL_SPEED)

# technique-specific sub-modes carried on the cursor stream
MODE_ABSOLUTE = "absolute"
MODE_RELATIVE = "relative"
MODE_CLUTCH_WAIT = "clutch_wait"
MODE_SNAPPING = "snapping"
MODE_SLOW = "slow"

# event kinds
POSE = "pose"
TOUCH_DOWN = "touch_down"
TOUCH_MOVE = "touch_move"
TOUCH_UP = "touch_up"
PAD_PRESS = "pad_press"
PAD_RELEASE = "pad_release"
TRIGGER_PRESS = "trigger_press"
TRIGGER_RELEASE = "trigger_release"


class InputEvent(NamedTuple):
    t_us: int
    kind: str
    data: object = None   # DevicePose for POSE, (x, y) meters for touches


class EngineOutput(NamedTuple):
    cursor: PixelPoint
    click: Optional[Tuple[PixelPoint, int]]
    mode_changed: bool


@dataclass(frozen=True)
class EngineParams:
    """Technique thresholds. Values not pinned by the design are knobs."""

    clutch_ms: float = 400.0        # hybrid: lift time before snap-back
    snap_tau_ms: float = 60.0       # snap animation time constant
    snap_threshold_px: float = 1.0  # snap terminates within this distance
    snap_instant: bool = False      # replace the animation with a jump
    tap_window_ms: float = 250.0    # relative: max touch duration of a tap
    tap_slop_m: float = 0.005       # relative: max finger travel of a tap
    slow_gain: float = 0.3          # dual-speed displacement fraction
    trigger_clicks: bool = False    # bind the trigger as a click source


class EventOrderError(ValueError):
    pass


class Engine:
    """Cursor state machine for one session. See module docstring."""

    __slots__ = (
        "technique", "display", "filter_params", "transfer_params", "params",
        "mode", "cx", "cy", "ax", "ay", "has_abs",
        "anchor_cx", "anchor_cy", "anchor_ax", "anchor_ay",
        "filter_state", "transfer_state",
        "touch_active", "touch_down_t", "touch_travel_m", "last_fx", "last_fy",
        "clutch_deadline_us", "snap_last_t_us", "last_t_us",
    )

    def __init__(self, technique: str, display: DisplayPlane,
                 filter_params: FilterParams = FilterParams(),
                 transfer_params: TransferParams = TransferParams(),
                 params: EngineParams = EngineParams()):
        if technique not in TECHNIQUES:
            raise ValueError(f"unknown technique {technique!r}")
        self.technique = technique
        self.display = display
        self.filter_params = filter_params
        self.transfer_params = transfer_params
        self.params = params

        self.mode = MODE_RELATIVE if technique == RELATIVE else MODE_ABSOLUTE
        c = display.center_px
        self.cx, self.cy = c.x, c.y      # cursor, always clamped
        self.ax, self.ay = c.x, c.y      # filtered absolute location
        self.has_abs = False
        self.anchor_cx = self.anchor_cy = 0.0
        self.anchor_ax = self.anchor_ay = 0.0
        self.filter_state = FilterState()
        self.transfer_state = TransferState()
        self.touch_active = False
        self.touch_down_t = 0
        self.touch_travel_m = 0.0
        self.last_fx = self.last_fy = 0.0
        self.clutch_deadline_us: Optional[int] = None
        self.snap_last_t_us = 0
        self.last_t_us = 0

    @property
    def cursor(self) -> PixelPoint:
        return PixelPoint(self.cx, self.cy)

    @property
    def absolute_location(self) -> PixelPoint:
        return PixelPoint(self.ax, self.ay)

    # ------------------------------------------------------------------
    # public entry points

    def handle_event(self, event: InputEvent) -> EngineOutput:
        t = event.t_us
        if t < self.last_t_us:
            raise EventOrderError(
                f"event at {t} before last processed {self.last_t_us}")
        changed = self._advance(t)
        kind = event.kind

        click = None
        if kind == POSE:
            changed |= self._on_pose(event.data, t)
        elif kind == TOUCH_DOWN:
            changed |= self._on_touch_down(event.data, t)
        elif kind == TOUCH_MOVE:
            changed |= self._on_touch_move(event.data, t)
        elif kind == TOUCH_UP:
            changed, click = self._on_touch_up(t, changed)
        elif kind == PAD_PRESS:
            click = self._on_press(t)
        elif kind == TRIGGER_PRESS:
            if self.params.trigger_clicks:
                click = self._on_press(t)
        elif kind in (PAD_RELEASE, TRIGGER_RELEASE):
            pass
        else:
            log.debug("engine: unknown event kind %r ignored", kind)
        self.last_t_us = t
        return EngineOutput(PixelPoint(self.cx, self.cy), click, changed)

    def advance_time(self, t_us: int) -> EngineOutput:
        changed = self._advance(t_us)
        if t_us > self.last_t_us:
            self.last_t_us = t_us
        return EngineOutput(PixelPoint(self.cx, self.cy), None, changed)

    # ------------------------------------------------------------------
    # timers and the snap animation

    def _advance(self, t_us: int) -> bool:
        if t_us <= self.last_t_us:
            return False
        changed = False
        if self.mode == MODE_CLUTCH_WAIT and t_us >= self.clutch_deadline_us:
            start = self.clutch_deadline_us
            self.clutch_deadline_us = None
            self._enter_snap(start)
            changed = True
        if self.mode == MODE_SNAPPING:
            changed |= self._advance_snap(t_us)
        return changed

    def _enter_snap(self, t_us: int) -> None:
        self.mode = MODE_SNAPPING
        self.snap_last_t_us = t_us
        if self.params.snap_instant:
            self._finish_snap()

    def _advance_snap(self, t_us: int) -> bool:
        dt_us = t_us - self.snap_last_t_us
        if dt_us < 0:
            return False
        self.snap_last_t_us = t_us
        tx, ty = self._clamped_abs()
        if dt_us > 0:
            f = 1.0 - math.exp(-dt_us / (self.params.snap_tau_ms * 1000.0))
            self.cx += f * (tx - self.cx)
            self.cy += f * (ty - self.cy)
        dx, dy = tx - self.cx, ty - self.cy
        if dx * dx + dy * dy <= self.params.snap_threshold_px ** 2:
            self._finish_snap()
            return True
        return False

    def _finish_snap(self) -> None:
        tx, ty = self._clamped_abs()
        self.cx, self.cy = tx, ty
        self.mode = MODE_ABSOLUTE

    def _clamped_abs(self):
        d = self.display
        x, y = self.ax, self.ay
        if x < 0.0:
            x = 0.0
        elif x > d.width_px:
            x = float(d.width_px)
        if y < 0.0:
            y = 0.0
        elif y > d.height_px:
            y = float(d.height_px)
        return x, y

    # ------------------------------------------------------------------
    # event handlers

    def _on_pose(self, pose: DevicePose, t: int) -> bool:
        if self.technique == RELATIVE:
            return False    # cursor is finger-driven only
        ray = extract_pose(pose)
        hit = intersect(ray, self.display)
        fs = self.filter_state
        if hit is None:
            if not self.has_abs:
                return False
            # tracking glitch or off-display aim: absolute location holds
            raw = fs.last_output
        else:
            raw = hit
        if fs.initialized and t <= fs.last_t_us:
            log.debug("engine: duplicate pose timestamp %d dropped", t)
            return False
        out = filter_step(fs, self.filter_params, raw, t)
        self.ax, self.ay = out.x, out.y
        self.has_abs = True

        mode = self.mode
        if mode == MODE_ABSOLUTE:
            self.cx, self.cy = self._clamped_abs()
        elif mode == MODE_SLOW:
            g = self.params.slow_gain
            x = self.anchor_cx + g * (self.ax - self.anchor_ax)
            y = self.anchor_cy + g * (self.ay - self.anchor_ay)
            d = self.display
            self.cx = 0.0 if x < 0.0 else (float(d.width_px) if x > d.width_px else x)
            self.cy = 0.0 if y < 0.0 else (float(d.height_px) if y > d.height_px else y)
        # relative/clutch_wait/snapping: pose updates the target only
        return False

    def _on_touch_down(self, finger, t: int) -> bool:
        tech = self.technique
        self.touch_active = True
        self.touch_down_t = t
        self.touch_travel_m = 0.0
        if finger is not None:
            self.last_fx, self.last_fy = float(finger[0]), float(finger[1])
        self.transfer_state.begin_stroke(finger if finger is not None else (0.0, 0.0), t)

        if tech == HYBRID:
            prev = self.mode
            self.clutch_deadline_us = None
            self.mode = MODE_RELATIVE
            return prev != MODE_RELATIVE
        if tech == DUAL_SPEED:
            prev = self.mode
            self.anchor_cx, self.anchor_cy = self.cx, self.cy
            self.anchor_ax, self.anchor_ay = self.ax, self.ay
            self.mode = MODE_SLOW
            return prev != MODE_SLOW
        return False

    def _on_touch_move(self, finger, t: int) -> bool:
        if not self.touch_active:
            log.debug("engine: touch_move with no active touch ignored")
            return False
        fx, fy = float(finger[0]), float(finger[1])
        dxm = fx - self.last_fx
        dym = fy - self.last_fy
        self.touch_travel_m += math.sqrt(dxm * dxm + dym * dym)
        self.last_fx, self.last_fy = fx, fy

        tech = self.technique
        if tech == RELATIVE or (tech == HYBRID and self.mode == MODE_RELATIVE):
            dx, dy = displacement(self.transfer_state, self.transfer_params,
                                  (fx, fy), t, self.display)
            if dx != 0.0 or dy != 0.0:
                d = self.display
                x, y = self.cx + dx, self.cy + dy
                self.cx = 0.0 if x < 0.0 else (float(d.width_px) if x > d.width_px else x)
                self.cy = 0.0 if y < 0.0 else (float(d.height_px) if y > d.height_px else y)
        return False

    def _on_touch_up(self, t: int, changed: bool):
        if not self.touch_active:
            log.debug("engine: touch_up with no active touch ignored")
            return changed, None
        self.touch_active = False
        self.transfer_state.end_stroke()
        click = None
        tech = self.technique
        if tech == RELATIVE:
            p = self.params
            if (t - self.touch_down_t) <= p.tap_window_ms * 1000.0 \
                    and self.touch_travel_m < p.tap_slop_m:
                click = (PixelPoint(self.cx, self.cy), t)
        elif tech == HYBRID:
            self.mode = MODE_CLUTCH_WAIT
            self.clutch_deadline_us = t + int(self.params.clutch_ms * 1000.0)
            changed = True
        elif tech == DUAL_SPEED:
            self._enter_snap(t)
            changed = True
        return changed, click

    def _on_press(self, t: int):
        if self.technique == RELATIVE:
            log.debug("engine: pad press ignored under relative technique")
            return None
        return (PixelPoint(self.cx, self.cy), t)
