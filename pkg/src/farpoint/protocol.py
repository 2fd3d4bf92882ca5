"""Wire protocol: message types, JSON codec, and session log files.

Every frame is one UTF-8 JSON object: a fixed envelope (protocol version,
message type, session id, per-direction sequence number, producer timestamp)
plus a type-specific body. The full field-by-field schema lives in
docs/protocol.md. Session logs are the same frames, newline-delimited, in
the order the session processed them, which makes a log both an audit trail
and a replayable input source.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, TextIO, Tuple

PROTOCOL_VERSION = 1

POSE = "pose"
TOUCH = "touch"
BUTTON = "button"
CURSOR = "cursor"
STIMULUS = "stimulus"
CLICK_RESULT = "click_result"
SESSION_CONTROL = "session_control"

MESSAGE_TYPES = (POSE, TOUCH, BUTTON, CURSOR, STIMULUS, CLICK_RESULT,
                 SESSION_CONTROL)

TOUCH_PHASES = ("down", "move", "up")
BUTTON_NAMES = ("pad", "trigger", "menu", "grip")
BUTTON_EDGES = ("press", "release")

# pose body button bitmask
PAD_TOUCHED = 0x1
PAD_PRESSED = 0x2
TRIGGER_PRESSED = 0x4


class DecodeError(ValueError):
    """Malformed frame. ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class UnknownMessageType(ValueError):
    """Frame was well-formed but its type tag is not in this protocol version."""

    def __init__(self, tag, version):
        super().__init__(
            f"unknown message type {tag!r} (protocol version {version})")
        self.tag = tag
        self.version = version


@dataclass(frozen=True)
class WireMessage:
    type: str
    session_id: str
    seq: int
    t_us: int
    body: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# constructors

def pose_message(session_id: str, seq: int, t_us: int,
                 matrix, buttons: int = 0) -> WireMessage:
    m = list(map(float, matrix))
    if len(m) != 16:
        raise ValueError("pose matrix must have 16 entries (row-major 4x4)")
    return WireMessage(POSE, session_id, seq, t_us,
                       {"m": m, "buttons": int(buttons)})


def touch_message(session_id: str, seq: int, t_us: int,
                  phase: str, x: float, y: float) -> WireMessage:
    if phase not in TOUCH_PHASES:
        raise ValueError(f"bad touch phase {phase!r}")
    return WireMessage(TOUCH, session_id, seq, t_us,
                       {"phase": phase, "x": float(x), "y": float(y)})


def button_message(session_id: str, seq: int, t_us: int,
                   name: str, edge: str) -> WireMessage:
    if name not in BUTTON_NAMES or edge not in BUTTON_EDGES:
        raise ValueError(f"bad button event {name!r}/{edge!r}")
    return WireMessage(BUTTON, session_id, seq, t_us,
                       {"name": name, "edge": edge})


def cursor_message(session_id: str, seq: int, t_us: int,
                   x: float, y: float, mode: str) -> WireMessage:
    return WireMessage(CURSOR, session_id, seq, t_us,
                       {"x": float(x), "y": float(y), "mode": mode})


def stimulus_message(session_id: str, seq: int, t_us: int, *,
                     set_index: int, technique: str, width_px: float,
                     amplitude_px: float, left_center_x: float,
                     right_center_x: float, target: str,
                     target_color: str = "green",
                     other_color: str = "white") -> WireMessage:
    return WireMessage(STIMULUS, session_id, seq, t_us, {
        "set_index": int(set_index), "technique": technique,
        "width_px": float(width_px), "amplitude_px": float(amplitude_px),
        "left_center_x": float(left_center_x),
        "right_center_x": float(right_center_x),
        "target": target, "target_color": target_color,
        "other_color": other_color,
    })


def click_result_message(session_id: str, seq: int, t_us: int, *,
                         hit: bool, set_index: int, trial_index: int,
                         x: float, y: float) -> WireMessage:
    return WireMessage(CLICK_RESULT, session_id, seq, t_us, {
        "hit": bool(hit), "set_index": int(set_index),
        "trial_index": int(trial_index), "x": float(x), "y": float(y),
    })


def session_control_message(session_id: str, seq: int, t_us: int,
                            action: str, **extra) -> WireMessage:
    body = {"action": action}
    body.update(extra)
    return WireMessage(SESSION_CONTROL, session_id, seq, t_us, body)


# ----------------------------------------------------------------------
# codec

def encode(msg: WireMessage) -> bytes:
    """One message, one UTF-8 JSON frame (no trailing newline)."""
    frame = {"v": PROTOCOL_VERSION, "type": msg.type, "sid": msg.session_id,
             "seq": msg.seq, "t_us": msg.t_us, "body": msg.body}
    return json.dumps(frame, separators=(",", ":")).encode("utf-8")


def decode(data) -> WireMessage:
    """Parse one frame; inverse of encode for every valid message."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8", errors="strict")
        except UnicodeDecodeError as e:
            raise DecodeError(f"invalid UTF-8: {e.reason}", e.start) from None
    else:
        text = data
    try:
        frame = json.loads(text)
    except json.JSONDecodeError as e:
        raise DecodeError(f"invalid JSON: {e.msg}", e.pos) from None
    if not isinstance(frame, dict):
        raise DecodeError("frame is not a JSON object")
    version = frame.get("v")
    mtype = frame.get("type")
    if mtype not in MESSAGE_TYPES:
        raise UnknownMessageType(mtype, version)
    if version != PROTOCOL_VERSION:
        raise DecodeError(f"unsupported protocol version {version!r}")
    try:
        sid = frame["sid"]
        seq = frame["seq"]
        t_us = frame["t_us"]
        body = frame["body"]
    except KeyError as e:
        raise DecodeError(f"missing envelope field {e.args[0]!r}") from None
    if not isinstance(sid, str) or not isinstance(seq, int) \
            or not isinstance(t_us, int) or not isinstance(body, dict):
        raise DecodeError("envelope field has wrong type")
    _validate_body(mtype, body)
    return WireMessage(mtype, sid, seq, t_us, body)


def _require(body, names, types):
    for name, typ in zip(names, types):
        if name not in body:
            raise DecodeError(f"body missing field {name!r}")
        v = body[name]
        if typ is float:
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(v):
                raise DecodeError(f"body field {name!r} must be a finite number")
        elif not isinstance(v, typ):
            raise DecodeError(f"body field {name!r} has wrong type")


def _validate_body(mtype: str, body: dict) -> None:
    if mtype == POSE:
        _require(body, ("m", "buttons"), (list, int))
        m = body["m"]
        if len(m) != 16:
            raise DecodeError(f"pose matrix has {len(m)} entries, expected 16")
        for v in m:
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(v):
                raise DecodeError("pose matrix entries must be finite numbers")
    elif mtype == TOUCH:
        _require(body, ("phase", "x", "y"), (str, float, float))
        if body["phase"] not in TOUCH_PHASES:
            raise DecodeError(f"bad touch phase {body['phase']!r}")
    elif mtype == BUTTON:
        _require(body, ("name", "edge"), (str, str))
        if body["name"] not in BUTTON_NAMES or body["edge"] not in BUTTON_EDGES:
            raise DecodeError("bad button name or edge")
    elif mtype == CURSOR:
        _require(body, ("x", "y", "mode"), (float, float, str))
    elif mtype == STIMULUS:
        _require(body, ("set_index", "technique", "width_px", "amplitude_px",
                        "left_center_x", "right_center_x", "target"),
                 (int, str, float, float, float, float, str))
    elif mtype == CLICK_RESULT:
        _require(body, ("hit", "set_index", "trial_index", "x", "y"),
                 (bool, int, int, float, float))
    elif mtype == SESSION_CONTROL:
        _require(body, ("action",), (str,))


INPUT_TYPES = (POSE, TOUCH, BUTTON)
OUTPUT_TYPES = (CURSOR, STIMULUS, CLICK_RESULT)


# ----------------------------------------------------------------------
# session logs

class ReplayError(ValueError):
    """Corrupt or inconsistent session log. ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SessionLogWriter:
    """Appends wire frames to a newline-delimited UTF-8 log file."""

    def __init__(self, path):
        self.path = path
        self._fh: Optional[TextIO] = open(path, "a", encoding="utf-8")

    def write(self, msg: WireMessage) -> None:
        self._fh.write(encode(msg).decode("utf-8"))
        self._fh.write("\n")

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_session_log(path, messages) -> None:
    with SessionLogWriter(path) as w:
        for m in messages:
            w.write(m)


def read_session_log(path) -> Iterator[Tuple[int, WireMessage]]:
    """Yield (line_number, message); halt with ReplayError on a bad record."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, decode(line)
            except (DecodeError, UnknownMessageType) as e:
                raise ReplayError(str(e), lineno) from None


def load_session_log(path) -> List[WireMessage]:
    return [msg for _, msg in read_session_log(path)]
