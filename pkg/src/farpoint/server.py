"""Session server: websocket ingress for producers, fan-out to displays.

One producer per session streams pose/touch/button frames; the server feeds
them through the session runner in arrival order and broadcasts the
resulting cursor/stimulus/click_result frames to every attached consumer.
Producer disconnects pause the session; reconnecting with the same session
id resumes it. An /echo endpoint supports the latency harness.
"""

from __future__ import annotations

import asyncio
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from . import protocol, wsock
from .config import Config, default_config
from .experiment import SetSpec
from .session import SessionRunner, formal_set_plan

log = logging.getLogger(__name__)

CONSUMER_QUEUE_LIMIT = 32


@dataclass
class LatencyReport:
    """One-way latency percentiles in microseconds (RTT / 2)."""

    requested: int
    count: int
    p50_us: Optional[float] = None
    p90_us: Optional[float] = None
    p99_us: Optional[float] = None

    @property
    def partial(self) -> bool:
        return self.count < self.requested

    @property
    def empty(self) -> bool:
        return self.count == 0


def _nearest_rank(sorted_samples: List[float], q: float) -> float:
    k = max(1, math.ceil(q / 100.0 * len(sorted_samples)))
    return sorted_samples[k - 1]


def build_latency_report(requested: int, one_way_us: List[float]) -> LatencyReport:
    if not one_way_us:
        return LatencyReport(requested=requested, count=0)
    s = sorted(one_way_us)
    return LatencyReport(requested=requested, count=len(s),
                         p50_us=_nearest_rank(s, 50.0),
                         p90_us=_nearest_rank(s, 90.0),
                         p99_us=_nearest_rank(s, 99.0))


async def measure_latency(transport, n: int, clock=time.perf_counter_ns,
                          timeout_s: float = 2.0) -> LatencyReport:
    """Round-trip ``n`` probes through an echo transport; report RTT/2.

    ``transport`` needs ``await send(text)`` and ``await recv() -> text``.
    ``clock`` returns nanoseconds; injectable so synthetic transports can
    supply a virtual clock. Missing echoes end the run early and the report
    is flagged partial.
    """
    samples: List[float] = []
    for i in range(n):
        probe = protocol.encode(protocol.session_control_message(
            "latency", i + 1, 0, "echo_probe")).decode("utf-8")
        t0 = clock()
        await transport.send(probe)
        try:
            echoed = await asyncio.wait_for(transport.recv(), timeout_s)
        except asyncio.TimeoutError:
            break
        if echoed is None:
            break
        t1 = clock()
        samples.append((t1 - t0) / 2.0 / 1000.0)
    return build_latency_report(n, samples)


class WebSocketTransport:
    def __init__(self, ws: wsock.WebSocket):
        self._ws = ws

    async def send(self, text: str) -> None:
        await self._ws.send_text(text)

    async def recv(self) -> Optional[str]:
        return await self._ws.recv_text()


class ConstantDelayTransport:
    """Synthetic echo with an exact one-way delay on a virtual clock.

    Validates the harness arithmetic without scheduler jitter: recv() just
    advances the virtual clock by one round trip.
    """

    def __init__(self, one_way_us: float):
        self.one_way_us = one_way_us
        self._now_ns = 0
        self._pending: List[str] = []

    def clock(self) -> int:
        return self._now_ns

    async def send(self, text: str) -> None:
        self._pending.append(text)

    async def recv(self) -> Optional[str]:
        if not self._pending:
            return None
        self._now_ns += int(2 * self.one_way_us * 1000)
        return self._pending.pop(0)


# ----------------------------------------------------------------------

@dataclass
class SessionInfo:
    session_id: str
    technique: str
    producer_connected: bool
    n_consumers: int
    paused: bool
    accepted: int
    dropped_seq: int
    rejected_pose: int
    broadcast_dropped: int
    latency: Optional[LatencyReport] = None


class _ServerSession:
    def __init__(self, runner: SessionRunner):
        self.runner = runner
        self.consumers: List[asyncio.Queue] = []
        self.producer_attached = False
        self.paused = False
        self.broadcast_dropped = 0
        self.latest_stimulus: Optional[str] = None
        self.latest_cursor: Optional[str] = None
        self.complete_frame: Optional[str] = None

    def broadcast(self, messages: List[protocol.WireMessage]) -> None:
        for msg in messages:
            frame = protocol.encode(msg).decode("utf-8")
            if msg.type == protocol.STIMULUS:
                self.latest_stimulus = frame
            elif msg.type == protocol.CURSOR:
                self.latest_cursor = frame
            elif msg.type == protocol.SESSION_CONTROL:
                self.complete_frame = frame
            for q in self.consumers:
                self._put(q, frame)

    def _put(self, q: asyncio.Queue, frame: str) -> None:
        if q.full():
            # drop-oldest backpressure policy
            try:
                q.get_nowait()
                self.broadcast_dropped += 1
            except asyncio.QueueEmpty:
                pass
        q.put_nowait(frame)

    def snapshot_for_late_joiner(self, q: asyncio.Queue) -> None:
        for frame in (self.latest_stimulus, self.latest_cursor,
                      self.complete_frame):
            if frame is not None:
                self._put(q, frame)


class SessionServer:
    def __init__(self, config: Optional[Config] = None,
                 log_dir: Optional[str] = None):
        self.config = config or default_config()
        self.log_dir = Path(log_dir) if log_dir else None
        self.sessions: Dict[str, _ServerSession] = {}
        self._server: Optional[asyncio.AbstractServer] = None

    # ------------------------------------------------------------------

    async def start(self, host: str, port: int) -> None:
        self._server = await wsock.serve(self._handle, host, port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    @property
    def port(self) -> int:
        return self._server.sockets[0].getsockname()[1]

    def info(self, session_id: str) -> SessionInfo:
        s = self.sessions[session_id]
        c = s.runner.counters
        return SessionInfo(
            session_id=session_id, technique=s.runner.technique,
            producer_connected=s.producer_attached,
            n_consumers=len(s.consumers), paused=s.paused,
            accepted=c.accepted, dropped_seq=c.dropped_seq,
            rejected_pose=c.rejected_pose,
            broadcast_dropped=s.broadcast_dropped)

    # ------------------------------------------------------------------

    async def _handle(self, ws: wsock.WebSocket) -> None:
        if ws.path.startswith("/echo"):
            while True:
                text = await ws.recv_text()
                if text is None:
                    return
                await ws.send_text(text)

        hello_text = await ws.recv_text()
        if hello_text is None:
            return
        try:
            hello = protocol.decode(hello_text)
        except (protocol.DecodeError, protocol.UnknownMessageType) as e:
            log.warning("rejected connection: %s", e)
            return
        if hello.type != protocol.SESSION_CONTROL \
                or hello.body.get("action") != "hello":
            log.warning("first frame was not a hello")
            return
        role = hello.body.get("role", "consumer")
        if role == "producer":
            await self._run_producer(ws, hello)
        else:
            await self._run_consumer(ws, hello.session_id)

    def _get_or_create(self, hello: protocol.WireMessage) -> _ServerSession:
        sid = hello.session_id
        if self.sessions.get(sid) is not None:
            return self.sessions[sid]
        technique = hello.body.get("technique", "absolute")
        plan = self._plan_from_hello(hello, technique)
        writer = None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            writer = protocol.SessionLogWriter(self.log_dir / f"{sid}.ndjson")
        runner = SessionRunner(sid, technique, self.config, plan,
                               log_writer=writer)
        session = _ServerSession(runner)
        self.sessions[sid] = session
        return session

    def _plan_from_hello(self, hello, technique: str):
        sets = hello.body.get("sets")
        if not sets:
            return formal_set_plan(self.config.study, technique)
        return [SetSpec(technique=technique, width_px=float(s["width_px"]),
                        amplitude_px=float(s["amplitude_px"]), set_index=i)
                for i, s in enumerate(sets)]

    async def _run_producer(self, ws: wsock.WebSocket,
                            hello: protocol.WireMessage) -> None:
        session = self._get_or_create(hello)
        if session.producer_attached:
            log.warning("session %s already has a producer", hello.session_id)
            await ws.close()
            return
        session.producer_attached = True
        session.paused = False
        try:
            out = session.runner.feed(hello)
            session.runner.write_outputs(out)
            session.broadcast(out)
            while True:
                text = await ws.recv_text()
                if text is None:
                    break
                try:
                    msg = protocol.decode(text)
                except (protocol.DecodeError, protocol.UnknownMessageType) as e:
                    log.debug("producer frame rejected: %s", e)
                    continue
                out = session.runner.feed(msg)
                session.runner.write_outputs(out)
                session.broadcast(out)
        finally:
            session.producer_attached = False
            session.paused = not session.runner.done
            if session.paused:
                log.info("session %s paused (producer disconnected)",
                         hello.session_id)

    async def _run_consumer(self, ws: wsock.WebSocket, session_id: str) -> None:
        if session_id not in self.sessions:
            # consumers may attach before the producer; create a placeholder
            # only when a hello with a technique arrives; otherwise wait
            self.sessions.setdefault(session_id, None)
        # waiting loop: the producer may not have created the session yet
        while self.sessions.get(session_id) is None:
            await asyncio.sleep(0.01)
        session = self.sessions[session_id]
        q: asyncio.Queue = asyncio.Queue(maxsize=CONSUMER_QUEUE_LIMIT)
        session.consumers.append(q)
        # late joiners need the running state, not just the live delta
        session.snapshot_for_late_joiner(q)
        try:
            while True:
                frame = await q.get()
                await ws.send_text(frame)
        except (ConnectionError, OSError):
            pass
        finally:
            session.consumers.remove(q)


async def run_server(config: Config, host: str, port: int,
                     log_dir: Optional[str] = None) -> None:
    server = SessionServer(config, log_dir)
    await server.start(host, port)
    log.info("listening on ws://%s:%d", host, server.port)
    try:
        await asyncio.Event().wait()
    finally:
        await server.stop()
