"""Session runner: one technique session from wire messages to broadcasts.

The runner is the single code path shared by the simulator, the network
server, and log replay, which is what makes a replayed log reproduce a live
session bit for bit. It validates and orders incoming frames, feeds the
cursor engine, drives the reciprocal-tapping set machine with engine clicks,
and emits cursor / stimulus / click_result frames.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

from . import protocol
from .config import Config
from .engine import (PAD_PRESS, PAD_RELEASE, POSE, TOUCH_DOWN, TOUCH_MOVE,
                     TOUCH_UP, TRIGGER_PRESS, TRIGGER_RELEASE, Engine,
                     InputEvent)
from .experiment import SET_COMPLETE, SetRecord, SetSpec, SetState
from .geometry import DevicePose, InvalidPoseError
from .protocol import WireMessage

log = logging.getLogger(__name__)

_TOUCH_KINDS = {"down": TOUCH_DOWN, "move": TOUCH_MOVE, "up": TOUCH_UP}
_BUTTON_KINDS = {("pad", "press"): PAD_PRESS, ("pad", "release"): PAD_RELEASE,
                 ("trigger", "press"): TRIGGER_PRESS,
                 ("trigger", "release"): TRIGGER_RELEASE}

# session_control actions by direction
PRODUCER_CONTROL_ACTIONS = ("hello", "pause", "resume", "end")
SERVER_CONTROL_ACTIONS = ("complete",)

SetPlan = Union[Sequence[SetSpec], Callable[[List[SetRecord]], Optional[SetSpec]]]


@dataclass
class SessionCounters:
    accepted: int = 0
    dropped_seq: int = 0
    rejected_pose: int = 0
    ignored: int = 0


class SessionRunner:
    """Feed input frames in arrival order; collect output frames.

    ``set_plan`` is either a list of SetSpec run in order, or a callable
    mapping the records so far to the next SetSpec (None ends the session);
    the callable form implements practice-to-criterion schedules.
    """

    def __init__(self, session_id: str, technique: str, config: Config,
                 set_plan: SetPlan, log_writer=None):
        self.session_id = session_id
        self.technique = technique
        self.config = config
        self.engine = Engine(technique, config.display, config.filter_params,
                             config.transfer_for(technique),
                             config.engine_params)
        self._plan = set_plan
        self._plan_pos = 0
        self.records: List[SetRecord] = []
        self.counters = SessionCounters()
        self.current_set: Optional[SetState] = None
        self.done = False
        self._log = log_writer
        self._last_in_seq = 0
        self._out_seq = 0
        self._last_cursor = None
        self._last_mode = None
        self._started = False

    # ------------------------------------------------------------------

    def feed(self, msg: WireMessage) -> List[WireMessage]:
        """Process one producer frame; returns the frames to broadcast.

        The first accepted frame also opens the first set, so its broadcast
        list starts with the initial stimulus.
        """
        if msg.session_id != self.session_id or msg.type not in protocol.INPUT_TYPES \
                and msg.type != protocol.SESSION_CONTROL:
            log.debug("session %s: frame %r ignored", self.session_id, msg.type)
            self.counters.ignored += 1
            return []
        if msg.seq <= self._last_in_seq:
            self.counters.dropped_seq += 1
            log.debug("session %s: frame seq %d after %d dropped",
                      self.session_id, msg.seq, self._last_in_seq)
            return []

        result = None
        if msg.type != protocol.SESSION_CONTROL:
            event = self._to_event(msg)
            if event is None:
                return []
            try:
                # rigidity is validated by extract_pose inside the engine; a
                # frame rejected there may still have ticked engine timers,
                # which is harmless (time advance is monotone and idempotent)
                result = self.engine.handle_event(event)
            except InvalidPoseError as e:
                self.counters.rejected_pose += 1
                log.debug("session %s: pose rejected: %s", self.session_id, e)
                return []

        self._last_in_seq = msg.seq
        self.counters.accepted += 1
        if self._log is not None:
            self._log.write(msg)

        out: List[WireMessage] = []
        if not self._started:
            self._started = True
            self._open_next_set(msg.t_us, out)
        if result is None:
            return out

        if result.click is not None and self.current_set is not None:
            self._handle_click(result.click, out)
        self._emit_cursor(result.cursor, msg.t_us, out,
                          force=result.mode_changed or result.click is not None)
        return out

    def write_outputs(self, out: List[WireMessage]) -> None:
        if self._log is not None:
            for m in out:
                self._log.write(m)

    # ------------------------------------------------------------------

    def _to_event(self, msg: WireMessage) -> Optional[InputEvent]:
        body = msg.body
        if msg.type == protocol.POSE:
            return InputEvent(msg.t_us, POSE, DevicePose(tuple(body["m"]),
                                                         msg.t_us))
        if msg.type == protocol.TOUCH:
            return InputEvent(msg.t_us, _TOUCH_KINDS[body["phase"]],
                              (body["x"], body["y"]))
        kind = _BUTTON_KINDS.get((body["name"], body["edge"]))
        if kind is None:
            self.counters.ignored += 1
            return None
        return InputEvent(msg.t_us, kind)

    def _handle_click(self, click, out: List[WireMessage]) -> None:
        position, t_us = click
        state = self.current_set
        outcome = state.handle_click(position, t_us)
        out.append(protocol.click_result_message(
            self.session_id, self._next_seq(), t_us,
            hit=outcome.hit, set_index=state.spec.set_index,
            trial_index=outcome.trial_index,
            x=position.x, y=position.y))
        if outcome.kind == SET_COMPLETE:
            self.records.append(outcome.record)
            self.current_set = None
            self._open_next_set(t_us, out)
        elif outcome.hit:
            out.append(self._stimulus(t_us))

    def _open_next_set(self, t_us: int, out: List[WireMessage]) -> None:
        spec = self._next_spec()
        if spec is None:
            self.done = True
            out.append(protocol.session_control_message(
                self.session_id, self._next_seq(), t_us, "complete",
                sets=len(self.records)))
        else:
            self.current_set = SetState(spec, self.config.display)
            out.append(self._stimulus(t_us))

    def _next_spec(self) -> Optional[SetSpec]:
        if callable(self._plan):
            return self._plan(self.records)
        if self._plan_pos >= len(self._plan):
            return None
        spec = self._plan[self._plan_pos]
        self._plan_pos += 1
        return spec

    def _stimulus(self, t_us: int) -> WireMessage:
        state = self.current_set
        left, right = state.spec.bar_centers(self.config.display)
        return protocol.stimulus_message(
            self.session_id, self._next_seq(), t_us,
            set_index=state.spec.set_index,
            technique=state.spec.technique,
            width_px=state.spec.width_px,
            amplitude_px=state.spec.amplitude_px,
            left_center_x=left, right_center_x=right,
            target=state.target)

    def _emit_cursor(self, cursor, t_us: int, out: List[WireMessage],
                     force: bool = False) -> None:
        mode = self.engine.mode
        pos = (cursor.x, cursor.y)
        if not force and pos == self._last_cursor and mode == self._last_mode:
            return
        self._last_cursor = pos
        self._last_mode = mode
        # built inline: this runs for nearly every pose of a session
        self._out_seq += 1
        out.append(WireMessage(protocol.CURSOR, self.session_id,
                               self._out_seq, t_us,
                               {"x": pos[0], "y": pos[1], "mode": mode}))

    def _next_seq(self) -> int:
        self._out_seq += 1
        return self._out_seq


def formal_set_plan(design, technique: str) -> List[SetSpec]:
    """The formal sets for one technique block, in counterbalanced order."""
    plan = []
    index = 0
    for width, amplitude in design.conditions():
        for _ in range(design.sets_per_condition):
            plan.append(SetSpec(technique=technique, width_px=width,
                                amplitude_px=amplitude, set_index=index))
            index += 1
    return plan


def practice_then_formal_plan(design, technique: str):
    """Callable plan: practice to criterion, then the formal sets."""
    from .experiment import CONTINUE_PRACTICE, practice_controller

    formal = formal_set_plan(design, technique)
    state = {"practice_done": False}

    def plan(records: List[SetRecord]) -> Optional[SetSpec]:
        if not state["practice_done"]:
            practice_records = [r for r in records if r.spec.practice]
            decision, spec = practice_controller(practice_records,
                                                 design.practice, technique)
            if decision == CONTINUE_PRACTICE:
                return spec
            state["practice_done"] = True
        formal_done = sum(1 for r in records if not r.spec.practice)
        if formal_done < len(formal):
            return formal[formal_done]
        return None

    return plan


def verify_replay(messages: Sequence[WireMessage], config: Config,
                  technique: Optional[str] = None) -> List[WireMessage]:
    """Re-run the inputs of a session log and check outputs match bit for bit.

    ``messages`` is a full session log (inputs and outputs interleaved in
    processing order). Returns the regenerated outputs. Raises
    protocol.ReplayError at the first line that diverges: a non-increasing
    input seq, a non-consecutive output seq, or any output whose content
    differs from what the engine regenerates.
    """
    session_id = messages[0].session_id if messages else "replay"
    if technique is None:
        for m in messages:
            if m.type == protocol.SESSION_CONTROL and m.body.get("action") == "hello":
                technique = m.body.get("technique")
                break
    if technique is None:
        raise protocol.ReplayError("no hello frame declaring the technique", 1)
    runner = SessionRunner(session_id, technique, config,
                           _plan_from_log(messages))

    regenerated: List[WireMessage] = []
    pending: List[WireMessage] = []
    in_seq = 0
    out_seq = 0
    for lineno, msg in enumerate(messages, start=1):
        is_input = msg.type in protocol.INPUT_TYPES or (
            msg.type == protocol.SESSION_CONTROL
            and msg.body.get("action") in PRODUCER_CONTROL_ACTIONS)
        if is_input:
            if msg.seq <= in_seq:
                raise protocol.ReplayError(
                    f"input seq {msg.seq} does not follow {in_seq}", lineno)
            in_seq = msg.seq
            if pending:
                raise protocol.ReplayError(
                    "log is missing recorded outputs", lineno)
            pending = runner.feed(msg)
            regenerated.extend(pending)
        else:
            if msg.seq != out_seq + 1:
                raise protocol.ReplayError(
                    f"output seq {msg.seq} does not follow {out_seq}", lineno)
            out_seq = msg.seq
            if not pending:
                raise protocol.ReplayError("unexpected output frame", lineno)
            expected = pending.pop(0)
            if expected != msg:
                raise protocol.ReplayError(
                    f"replayed output diverges from the record", lineno)
    if pending:
        raise protocol.ReplayError("log ends before its final outputs",
                                   len(messages))
    return regenerated


def _plan_from_log(messages: Sequence[WireMessage]) -> List[SetSpec]:
    seen = {}
    for m in messages:
        if m.type == protocol.STIMULUS:
            b = m.body
            seen.setdefault(b["set_index"], SetSpec(
                technique=b["technique"], width_px=b["width_px"],
                amplitude_px=b["amplitude_px"], set_index=b["set_index"]))
    return [seen[k] for k in sorted(seen)]
