"""Deterministic synthetic operator standing in for a tracked controller.

The operator closes the loop through the real pipeline: it emits wire
messages (poses with band-limited tremor and click shake, trackpad/touch
strokes, button edges), the session runner feeds them to the cursor engine,
and the operator steers from the cursor broadcasts exactly as a human would
from the wall display. Movement is ballistic-plus-corrections: each aimed
submovement lands with noise proportional to its extent, and corrections
repeat until the observed cursor sits inside a safety-margin region of the
target bar. All randomness comes from one seeded generator, so a scenario
replays byte-identically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from . import protocol
from .config import Config, default_config
from .engine import ABSOLUTE, DUAL_SPEED, HYBRID, RELATIVE
from .experiment import SetRecord, StudyDesign
from .session import SessionRunner, formal_set_plan, practice_then_formal_plan
from .transfer import cd_gain

_MIN_JERK_PEAK = 1.875   # peak/mean speed ratio of a minimum-jerk profile


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class MovementProfile:
    """Aimed-movement timing and precision knobs (calibration, not facts)."""

    submove_base_ms: float = 130.0      # fixed cost of one aimed submovement
    submove_log_ms: float = 55.0        # added per log2(1 + degrees of extent)
    endpoint_noise_frac: float = 0.15   # endpoint sigma / movement extent
    finger_noise_floor_m: float = 0.0004  # absolute finger placement noise
    evaluate_ms: float = 60.0           # pause to judge where the cursor sat
    reaction_jitter_ms: float = 15.0    # sd of the decide-to-act latency
    click_travel_ms: float = 100.0      # shake onset precedes switch closure
    press_hold_ms: float = 60.0
    release_gap_ms: float = 60.0        # click to finger-lift gap
    tap_ms: float = 85.0                # touch duration of a click tap
    lift_ms: float = 110.0              # lift/reposition between swipes
    accept_margin_frac: float = 0.10    # stay this fraction of W off the edge
    swipe_span_m: float = 0.035         # thumb travel per trackpad swipe
    touch_span_m: float = 0.16          # finger travel per tablet swipe
    swipe_base_ms: float = 150.0
    swipe_ms_per_m: float = 1200.0
    swipe_min_ms: float = 280.0         # swipes stay slower than a tap
    tap_slide_m: float = 0.00007        # finger slide sd within a click tap
    undershoot_frac: float = 0.6        # aim short of center (movement economy)
    fine_entry_px_hybrid: float = 250.0 # switch to the finger inside this
    fine_entry_px_dual: float = 200.0   # touch the pad inside this


@dataclass(frozen=True)
class HumanModel:
    tremor_band_hz: Tuple[float, float] = (8.0, 12.0)
    tremor_rms_deg: float = 0.10
    click_shake_peak_deg: float = 0.30
    click_shake_decay_ms: float = 60.0
    reaction_overhead_ms: float = 100.0
    dwell_before_click_ms: float = 150.0
    movement: MovementProfile = MovementProfile()
    rng_seed: int = 0

    def __post_init__(self):
        lo, hi = self.tremor_band_hz
        if not (0 < lo < hi):
            raise ScenarioError("tremor band must satisfy 0 < low < high")
        for v in (self.tremor_rms_deg, self.click_shake_peak_deg,
                  self.click_shake_decay_ms, self.reaction_overhead_ms,
                  self.dwell_before_click_ms):
            if v < 0:
                raise ScenarioError("human model magnitudes must be >= 0")


@dataclass(frozen=True)
class SimScenario:
    design: StudyDesign = StudyDesign()
    human: HumanModel = HumanModel()
    stand_position: Tuple[float, float, float] = (0.0, 1.455, 2.0)
    pose_rate_hz: float = 90.0
    touch_rate_hz: float = 60.0
    session_prefix: str = "sim"
    include_practice: bool = False
    max_set_s: float = 120.0

    def __post_init__(self):
        if self.pose_rate_hz <= 0 or self.touch_rate_hz <= 0:
            raise ScenarioError("event rates must be positive")


@dataclass
class SessionResult:
    session_id: str
    technique: str
    messages: List[protocol.WireMessage]        # inputs and outputs, log order
    records: List[SetRecord]
    ground_truth: List[dict]

    @property
    def input_messages(self):
        return [m for m in self.messages if m.type in protocol.INPUT_TYPES
                or (m.type == protocol.SESSION_CONTROL
                    and m.body.get("action") == "hello")]


@dataclass
class SimResult:
    sessions: Dict[str, SessionResult]

    @property
    def records(self) -> List[SetRecord]:
        out = []
        for tech in self.sessions:
            out.extend(self.sessions[tech].records)
        return out

    @property
    def messages(self) -> List[protocol.WireMessage]:
        out = []
        for tech in self.sessions:
            out.extend(self.sessions[tech].messages)
        return out


def simulate_run(scenario: SimScenario, config: Optional[Config] = None,
                 retain_messages: bool = True) -> SimResult:
    """Run every technique block in the scenario's design. Deterministic.

    ``retain_messages=False`` skips keeping the wire log in memory (records
    and ground truth only), for large batch studies.
    """
    config = config or default_config()
    rng = random.Random(scenario.human.rng_seed)
    sessions = {}
    for technique in scenario.design.technique_order():
        sessions[technique] = _run_session(technique, scenario, config, rng,
                                           retain_messages)
    return SimResult(sessions)


def replay(log_path):
    """Re-emit the ordered messages of a session log file."""
    return protocol.load_session_log(log_path)


# ----------------------------------------------------------------------

def _run_session(technique: str, scenario: SimScenario, config: Config,
                 rng: random.Random,
                 retain_messages: bool = True) -> SessionResult:
    session_id = f"{scenario.session_prefix}-{technique}"
    if scenario.include_practice:
        plan = practice_then_formal_plan(scenario.design, technique)
    else:
        plan = formal_set_plan(scenario.design, technique)
    runner = SessionRunner(session_id, technique, config, plan)
    op = _Operator(technique, scenario, config, rng)
    log: List[protocol.WireMessage] = []
    runner_feed = runner.feed
    observe = op.observe

    if retain_messages:
        def feed(msg):
            log.append(msg)
            outs = runner_feed(msg)
            log.extend(outs)
            observe(outs)
    else:
        def feed(msg):
            observe(runner_feed(msg))

    seq = 0
    feed(protocol.session_control_message(
        session_id, 1, 0, "hello", role="producer", technique=technique))
    seq = 1

    has_pose = technique != RELATIVE
    rate = scenario.pose_rate_hz if has_pose else scenario.touch_rate_hz
    limit_us = int(scenario.max_set_s * 1e6)
    deadline = limit_us
    tick = 0
    pose_message = op.pose_message
    think = op.think
    sched = op.sched
    while not runner.done:
        t = round(tick * 1e6 / rate)
        if t > deadline:
            raise ScenarioError(
                f"set did not complete within {scenario.max_set_s:.0f} s "
                f"of simulated time ({technique})")
        while sched and sched[0][0] <= t:
            te, mtype, body = sched.pop(0)
            seq += 1
            feed(protocol.WireMessage(mtype, session_id, seq, te, body))
            if runner.done:
                break
        if runner.done:
            break
        if has_pose:
            seq += 1
            feed(pose_message(session_id, seq, t, tick))
        think(t)
        if op.set_index_seen != op.last_deadline_set:
            deadline = t + limit_us
            op.last_deadline_set = op.set_index_seen
        tick += 1

    return SessionResult(session_id, technique, log, runner.records,
                         op.ground_truth)


# ----------------------------------------------------------------------

class _Operator:
    """Phase-machine operator for one technique session."""

    def __init__(self, technique: str, scenario: SimScenario, config: Config,
                 rng: random.Random):
        self.technique = technique
        self.human = scenario.human
        self.prof = scenario.human.movement
        self.display = config.display
        self.stand = scenario.stand_position
        self.engine_params = config.engine_params
        self.transfer_params = config.transfer_for(technique)
        self.touch_period_us = round(1e6 / scenario.touch_rate_hz)
        self.rng = rng

        c = self.display.center_px
        self.intended = (c.x, c.y)        # aim point, pixel space
        self.plan = None                  # (t0, t1, x0, y0, x1, y1)
        self.phase = "idle"
        self.phase_end = 0

        self.cursor = (c.x, c.y)
        self.mode = "absolute"
        self.target_x = None
        self.width = None
        self.set_index_seen = -1
        self.last_deadline_set = -1
        self.result_pending = False
        self.await_mode_target = "absolute"

        self.touching = False
        self.finger = (0.0, 0.0)
        self.g_est = 30.0 if technique == RELATIVE else 8.0
        self.swipe_expect = None          # (cursor_x at swipe start, planned px)

        self.sched: List[Tuple[int, str, dict]] = []
        self.shakes: List[Tuple[int, float, float]] = []
        self.tremor = _Tremor(self.human, rng, scenario.pose_rate_hz) \
            if technique != RELATIVE else None
        self.ground_truth: List[dict] = []
        self.done = False

    # -------------------------------------------------- wire-side helpers

    def _schedule(self, t: int, mtype: str, body: dict) -> None:
        # keep the queue time-ordered; inserts are near the tail in practice
        i = len(self.sched)
        while i > 0 and self.sched[i - 1][0] > t:
            i -= 1
        self.sched.insert(i, (t, mtype, body))

    def _touch_grid(self, t: int) -> int:
        # touch samples sit on the producer's 60 Hz grid
        p = self.touch_period_us
        return ((t + p - 1) // p) * p

    def pose_message(self, session_id: str, seq: int, t: int, tick: int):
        x, y = self._plan_pos(t)
        px_m = self.display.pixel_to_room((x, y))
        sx, sy, sz = self.stand
        dx, dy, dz = px_m[0] - sx, px_m[1] - sy, px_m[2] - sz
        n = math.sqrt(dx * dx + dy * dy + dz * dz)
        yaw = math.degrees(math.atan2(-dx / n, -dz / n))
        pitch = math.degrees(math.asin(dy / n))
        ty, tp = self.tremor.sample_tick(tick)
        yaw += ty
        pitch += tp
        if self.shakes:
            sy_, sp_ = self._shake(t)
            yaw += sy_
            pitch += sp_
        m = _pose_matrix(yaw, pitch, self.stand)
        buttons = protocol.PAD_TOUCHED if self.touching else 0
        return protocol.pose_message(session_id, seq, t, m, buttons)

    def _plan_pos(self, t: int):
        plan = self.plan
        if plan is None:
            return self.intended
        t0, t1, x0, y0, x1, y1 = plan
        if t >= t1:
            self.plan = None
            self.intended = (x1, y1)
            return self.intended
        if t <= t0:
            return (x0, y0)
        s = (t - t0) / (t1 - t0)
        f = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
        return (x0 + f * (x1 - x0), y0 + f * (y1 - y0))

    def _shake(self, t: int):
        """Press-twist angle: ramps up while the switch is being depressed
        (peaking exactly when the click registers), then decays with the
        configured time constant."""
        if not self.shakes:
            return 0.0, 0.0
        tau = self.human.click_shake_decay_ms * 1000.0
        oy = op = 0.0
        keep = []
        for onset, press_t, ay, apitch in self.shakes:
            if t < onset:
                keep.append((onset, press_t, ay, apitch))
                continue
            if t < press_t:
                f = (t - onset) / (press_t - onset)
            else:
                f = math.exp(-(t - press_t) / tau)
                if f <= 0.005:
                    continue
            keep.append((onset, press_t, ay, apitch))
            oy += ay * f
            op += apitch * f
        self.shakes = keep
        return oy, op

    # -------------------------------------------------- observations

    def observe(self, outputs) -> None:
        for m in outputs:
            mtype = m.type
            if mtype == protocol.CURSOR:
                b = m.body
                self.cursor = (b["x"], b["y"])
                self.mode = b["mode"]
            elif mtype == protocol.CLICK_RESULT:
                b = m.body
                self.result_pending = False
                if self.ground_truth:
                    self.ground_truth[-1]["hit"] = b["hit"]
                if b["hit"]:
                    self.phase = "start_trial"   # stimulus follows with the target
                else:
                    # must re-click the same bar: re-evaluate from where we are
                    self.phase = "evaluate"
                    self.phase_end = m.t_us + self._ms(self.prof.evaluate_ms)
            elif mtype == protocol.STIMULUS:
                b = m.body
                self.target_x = b["left_center_x"] if b["target"] == "left" \
                    else b["right_center_x"]
                self.width = b["width_px"]
                if b["set_index"] != self.set_index_seen:
                    self.set_index_seen = b["set_index"]
                self.phase = "start_trial"
            elif mtype == protocol.SESSION_CONTROL and \
                    m.body.get("action") == "complete":
                self.done = True

    # -------------------------------------------------- decision making

    def think(self, t: int) -> None:
        if self.done or self.target_x is None or self.result_pending:
            return
        phase = self.phase
        if phase == "start_trial":
            self._start_trial(t)
        elif phase == "aim":
            if self.plan is None or t >= self.plan[1]:
                self._plan_pos(t)
                self.phase = "evaluate"
                self.phase_end = t + self._ms(self.prof.evaluate_ms)
        elif phase == "evaluate":
            if t >= self.phase_end:
                self._after_evaluate(t)
        elif phase == "dwell":
            if t >= self.phase_end:
                self._after_dwell(t)
        elif phase == "swipe":
            if t >= self.phase_end:
                self._after_swipe(t)
        elif phase == "await_mode":
            if self.mode == self.await_mode_target:
                self.phase = "evaluate"
                self.phase_end = t + self._ms(self.prof.evaluate_ms)
        # press_wait/tap_wait resolve via observe()

    def _ms(self, ms: float) -> int:
        return int(ms * 1000)

    def _start_trial(self, t: int) -> None:
        tech = self.technique
        if tech == ABSOLUTE:
            self._plan_submove(t, self.target_x)
            return
        if tech == RELATIVE:
            self._fine_step(t)
            return
        # hybrid / dual_speed: if the finger is still down from the previous
        # click, lift it and aim for the next target during the snap-back
        if self.touching:
            lift_t = self._touch_grid(t + self._ms(self.prof.release_gap_ms))
            self._schedule(lift_t, protocol.TOUCH,
                           {"phase": "up", "x": self.finger[0], "y": self.finger[1]})
            self.touching = False
        self._plan_submove(t, self.target_x)

    def _plan_submove(self, t: int, target_x: float,
                      gain_divisor: float = 1.0) -> None:
        """Aim the intended point at target_x (pixel space) with noise.

        Aims short of the bar center by a fraction of the acceptable region
        (movement economy: people stop as soon as the cursor is acceptably
        inside), which concentrates endpoints toward the near edge.
        """
        self._plan_pos(t)    # settle any finished plan into self.intended
        x0, y0 = self.intended
        cy = self.display.center_px.y
        err = target_x - self.cursor[0]
        if self.width is not None and err != 0.0:
            undershoot = self.prof.undershoot_frac * self._accept_halfwidth()
            err -= math.copysign(min(undershoot, abs(err) * 0.5), err)
        dx = err / gain_divisor
        goal_x = x0 + dx
        goal_y = y0 + 0.5 * (cy - y0)
        extent = abs(goal_x - x0)
        sigma = self.prof.endpoint_noise_frac * extent
        goal_x += self.rng.gauss(0.0, sigma)
        goal_y += self.rng.gauss(0.0, 0.3 * sigma)
        deg = self._px_to_deg(extent)
        dur = self.prof.submove_base_ms + \
            self.prof.submove_log_ms * math.log2(1.0 + deg)
        self.plan = (t, t + self._ms(dur), x0, y0, goal_x, goal_y)
        self.phase = "aim"

    def _px_to_deg(self, px: float) -> float:
        dist = abs(self.stand[2] - self.display.top_left[2])
        return math.degrees(math.atan(px / self.display.px_per_m_x / max(dist, 1e-6)))

    def _accept_halfwidth(self) -> float:
        return self.width / 2.0 - self.prof.accept_margin_frac * self.width

    def _in_accept(self) -> bool:
        return abs(self.cursor[0] - self.target_x) <= self._accept_halfwidth()

    def _after_evaluate(self, t: int) -> None:
        tech = self.technique
        err = self.target_x - self.cursor[0]
        if tech == ABSOLUTE:
            if self._in_accept():
                self._begin_dwell(t)
            else:
                self._plan_submove(t, self.target_x)
            return
        if tech == HYBRID:
            if self.mode == "relative":
                self._fine_step(t)
            elif self.mode != "absolute":
                # clutch wait or snap-back: the cursor is not tracking the
                # aim yet, so correcting now would double-count the error
                self.phase = "await_mode"
                self.await_mode_target = "absolute"
            elif abs(err) <= self.prof.fine_entry_px_hybrid:
                self._touch(t)
            else:
                self._plan_submove(t, self.target_x)
            return
        if tech == DUAL_SPEED:
            if self.mode == "slow":
                if self._in_accept():
                    self._begin_dwell(t)
                else:
                    self._plan_submove(t, self.target_x,
                                       gain_divisor=self.engine_params.slow_gain)
            elif self.mode != "absolute":
                self.phase = "await_mode"
                self.await_mode_target = "absolute"
            elif abs(err) <= self.prof.fine_entry_px_dual:
                self._touch(t)
            else:
                self._plan_submove(t, self.target_x)
            return
        # relative
        self._fine_step(t)

    def _begin_dwell(self, t: int) -> None:
        self.phase = "dwell"
        self.phase_end = t + self._ms(self.human.dwell_before_click_ms)

    def _after_dwell(self, t: int) -> None:
        if not self._in_accept():
            self.phase = "start_trial"
            return
        self._press(t)

    def _touch(self, t: int) -> None:
        """Put the finger on the pad; the engine flips modes on the event."""
        delay = self.human.reaction_overhead_ms / 2.0 + \
            abs(self.rng.gauss(0.0, self.prof.reaction_jitter_ms))
        td = self._touch_grid(t + self._ms(delay))
        self.finger = (0.0, 0.0)
        self._schedule(td, protocol.TOUCH, {"phase": "down", "x": 0.0, "y": 0.0})
        self.touching = True
        self.phase = "await_mode"
        self.await_mode_target = "relative" if self.technique == HYBRID else "slow"

    def _press(self, t: int) -> None:
        """Commit to a click: reaction latency, shake onset, switch closure."""
        act = t + self._ms(self.human.reaction_overhead_ms
                           + abs(self.rng.gauss(0.0, self.prof.reaction_jitter_ms)))
        tech = self.technique
        if tech == RELATIVE:
            td = self._touch_grid(act)
            tu = self._touch_grid(td + self._ms(self.prof.tap_ms))
            if tu <= td:
                tu = td + self.touch_period_us
            # taps are not perfectly still: a fraction of a millimeter of
            # slide leaks through the transfer function at the click
            sx = self.rng.gauss(0.0, self.prof.tap_slide_m)
            sy = self.rng.gauss(0.0, self.prof.tap_slide_m)
            self._schedule(td, protocol.TOUCH, {"phase": "down", "x": 0.0, "y": 0.0})
            self._schedule((td + tu) // 2, protocol.TOUCH,
                           {"phase": "move", "x": sx, "y": sy})
            self._schedule(tu, protocol.TOUCH, {"phase": "up", "x": sx, "y": sy})
            press_t = tu
        else:
            theta = self.rng.uniform(0.0, 2.0 * math.pi)
            peak = self.human.click_shake_peak_deg
            press_t = act + self._ms(self.prof.click_travel_ms)
            self.shakes.append((act, press_t, peak * math.cos(theta),
                                peak * math.sin(theta)))
            self._schedule(press_t, protocol.BUTTON,
                           {"name": "pad", "edge": "press"})
            self._schedule(press_t + self._ms(self.prof.press_hold_ms),
                           protocol.BUTTON, {"name": "pad", "edge": "release"})
        self.result_pending = True
        self.phase = "press_wait"
        self.ground_truth.append({
            "technique": tech, "set_index": self.set_index_seen,
            "t_press_us": press_t, "target_x": self.target_x,
            "width_px": self.width, "cursor_at_decide": self.cursor,
            "hit": None,
        })

    # -------------------------------------------------- finger movement

    def _fine_step(self, t: int) -> None:
        """Relative positioning step: swipe toward the target or click."""
        err = self.target_x - self.cursor[0]
        if abs(err) <= self._accept_halfwidth():
            if self.technique == RELATIVE and self.touching:
                # settle the finger before the click tap
                tu = self._touch_grid(t)
                self._schedule(tu, protocol.TOUCH,
                               {"phase": "up", "x": self.finger[0], "y": self.finger[1]})
                self.touching = False
            self._begin_dwell(t)
            return
        self._plan_swipe(t, err)

    def _plan_swipe(self, t: int, err_px: float) -> None:
        prof = self.prof
        span = prof.touch_span_m if self.technique == RELATIVE else prof.swipe_span_m
        ppm = self.display.px_per_m_x
        dist = abs(err_px) / (self.g_est * ppm)
        # settle planned distance and duration against the speed-driven gain
        for _ in range(3):
            dist = min(max(dist, 2e-4), span)
            dur_ms = max(prof.swipe_min_ms,
                         prof.swipe_base_ms + prof.swipe_ms_per_m * dist)
            v_eff = 0.8 * _MIN_JERK_PEAK * dist / (dur_ms / 1000.0)
            g = cd_gain(self.transfer_params, v_eff)
            dist = abs(err_px) / (g * ppm)
        dist = min(max(dist, 2e-4), span)
        dist *= 1.0 + self.rng.gauss(0.0, prof.endpoint_noise_frac)
        dist += self.rng.gauss(0.0, prof.finger_noise_floor_m)
        dist = min(max(dist, 1e-4), span)

        start = self._touch_grid(t)
        gap_budget = self.engine_params.clutch_ms * 0.6
        if not self.touching:
            self.finger = (0.0, 0.0)
            self._schedule(start, protocol.TOUCH,
                           {"phase": "down", "x": 0.0, "y": 0.0})
            self.touching = True
            start = start + self.touch_period_us
        elif abs(self.finger[0]) + dist > span:
            # out of pad: lift, recenter, continue (clutch)
            lift = min(self.prof.lift_ms, gap_budget)
            self._schedule(start, protocol.TOUCH,
                           {"phase": "up", "x": self.finger[0], "y": self.finger[1]})
            start = self._touch_grid(start + self._ms(lift))
            self.finger = (0.0, 0.0)
            self._schedule(start, protocol.TOUCH,
                           {"phase": "down", "x": 0.0, "y": 0.0})
            start = start + self.touch_period_us

        direction = 1.0 if err_px > 0 else -1.0
        x0, y0 = self.finger
        x1 = x0 + direction * dist
        y1 = y0 + self.rng.gauss(0.0, 0.05 * dist)
        end = start + self._ms(dur_ms)
        n = max(2, (end - start) // self.touch_period_us)
        for i in range(1, int(n) + 1):
            s = i / n
            f = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
            te = start + round((end - start) * s)
            self._schedule(te, protocol.TOUCH, {
                "phase": "move",
                "x": x0 + f * (x1 - x0), "y": y0 + f * (y1 - y0)})
        self.finger = (x1, y1)
        self.swipe_expect = (self.cursor[0], err_px)
        self.phase = "swipe"
        self.phase_end = end + self._ms(self.prof.evaluate_ms)

    def _after_swipe(self, t: int) -> None:
        # update the internal gain model from what the swipe actually did
        if self.swipe_expect is not None:
            start_x, err = self.swipe_expect
            moved = self.cursor[0] - start_x
            if abs(moved) > 1.0 and err != 0.0:
                realized = self.g_est * (moved / err)
                if realized > 0.1:
                    self.g_est += 0.4 * (realized - self.g_est)
            self.swipe_expect = None
        self._fine_step(t)


# ----------------------------------------------------------------------

class _Tremor:
    """Band-limited angular noise: five in-band sinusoids plus white noise.

    Samples are precomputed on the pose-tick grid in vectorized chunks; the
    per-tick cost is an array lookup. Deterministic given the master rng.
    """

    CHUNK = 2048

    def __init__(self, human: HumanModel, rng: random.Random,
                 tick_rate_hz: float):
        import numpy as np

        lo, hi = human.tremor_band_hz
        rms = human.tremor_rms_deg
        self._np = np
        self._rng = np.random.default_rng(rng.getrandbits(64))
        self._rate = tick_rate_hz
        self.white_sigma = 0.1 * rms
        self.omegas = []
        self.phases = []
        self.amps = []
        for _ in range(2):                 # yaw axis, pitch axis
            freqs = np.array([rng.uniform(lo, hi) for _ in range(5)])
            phases = np.array([rng.uniform(0.0, 2.0 * math.pi) for _ in range(5)])
            amps = np.array([rng.uniform(0.5, 1.0) for _ in range(5)])
            power = math.sqrt(float(np.sum(amps * amps)) / 2.0)
            scale = rms / power if power > 0 else 0.0
            self.omegas.append(2.0 * math.pi * freqs)
            self.phases.append(phases)
            self.amps.append(amps * scale)
        self._chunk_start = -1
        self._yaw = None
        self._pitch = None

    def _fill(self, chunk_index: int) -> None:
        np = self._np
        n0 = chunk_index * self.CHUNK
        ticks = np.arange(n0, n0 + self.CHUNK)
        t = np.round(ticks * 1e6 / self._rate) * 1e-6
        out = []
        for axis in range(2):
            v = np.zeros(self.CHUNK)
            for w, ph, a in zip(self.omegas[axis], self.phases[axis],
                                self.amps[axis]):
                v += a * np.sin(w * t + ph)
            if self.white_sigma > 0.0:
                v += self._rng.normal(0.0, self.white_sigma, size=self.CHUNK)
            out.append(v)
        self._yaw, self._pitch = out
        self._chunk_start = n0

    def sample_tick(self, tick: int):
        offset = tick - self._chunk_start
        if self._yaw is None or not 0 <= offset < self.CHUNK:
            self._fill(tick // self.CHUNK)
            offset = tick - self._chunk_start
        return self._yaw[offset], self._pitch[offset]


def _pose_matrix(yaw_deg: float, pitch_deg: float, position):
    """Row-major rigid transform with R = Ry(yaw) @ Rx(pitch)."""
    cy = math.cos(math.radians(yaw_deg))
    sy = math.sin(math.radians(yaw_deg))
    cp = math.cos(math.radians(pitch_deg))
    sp = math.sin(math.radians(pitch_deg))
    px, py, pz = position
    return (cy, sy * sp, sy * cp, px,
            0.0, cp, -sp, py,
            -sy, cy * sp, cy * cp, pz,
            0.0, 0.0, 0.0, 1.0)


# ----------------------------------------------------------------------

def build_scenario(section: dict, design: StudyDesign, rng_seed: int = 0,
                   **overrides) -> SimScenario:
    """SimScenario from a configuration file's `simulator` section.

    Unknown keys are rejected so typos in scenario files fail loudly.
    """
    import dataclasses

    def pick(cls, data, **extra):
        valid = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - valid
        if unknown:
            raise ScenarioError(
                f"unknown {cls.__name__} keys: {sorted(unknown)}")
        return cls(**{**data, **extra})

    section = dict(section or {})
    human_section = dict(section.pop("human", {}) or {})
    movement_section = dict(human_section.pop("movement", {}) or {})
    if "tremor_band_hz" in human_section:
        human_section["tremor_band_hz"] = tuple(human_section["tremor_band_hz"])
    human = pick(HumanModel, human_section,
                 movement=pick(MovementProfile, movement_section),
                 rng_seed=int(rng_seed))
    if "stand_position" in section:
        section["stand_position"] = tuple(section["stand_position"])
    return pick(SimScenario, section, design=design, human=human, **overrides)


def _study_one_seed(args):
    scenario, config = args
    result = simulate_run(scenario, config, retain_messages=False)
    return scenario.human.rng_seed, result


def simulate_study(design: StudyDesign, seeds, config: Optional[Config] = None,
                   scenario: Optional[SimScenario] = None,
                   parallel: bool = True):
    """Run the design once per seed; returns [(seed, SimResult), ...].

    Seeds play the role of participants: each seed is an independent
    operator with its own noise stream running every technique block.
    Independent seeds may run on worker processes (``parallel``); results
    are identical either way and are returned in seed order.
    """
    config = config or default_config()
    base = scenario or SimScenario(design=design)
    jobs = []
    for seed in seeds:
        jobs.append((replace(base, design=design,
                             human=replace(base.human, rng_seed=int(seed)),
                             session_prefix=f"{base.session_prefix}-s{seed}"),
                     config))
    import os
    if parallel and len(jobs) > 1 and (os.cpu_count() or 1) > 1:
        import concurrent.futures as cf
        try:
            with cf.ProcessPoolExecutor() as pool:
                return list(pool.map(_study_one_seed, jobs, chunksize=1))
        except (OSError, RuntimeError):
            pass    # no subprocess support here; fall through to serial
    return [_study_one_seed(j) for j in jobs]
