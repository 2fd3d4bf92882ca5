"""Minimal WebSocket (RFC 6455) server and client over asyncio streams.

Implements exactly what this project needs to exchange text frames with
browsers and with its own tooling: the HTTP upgrade handshake, masked and
unmasked text frames with 7/16/64-bit lengths, fragmentation reassembly,
ping/pong, and clean closes. No extensions, no subprotocols, no TLS.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import os
from typing import Awaitable, Callable, Optional
from urllib.parse import urlparse

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
MAX_FRAME_BYTES = 4 * 1024 * 1024

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class HandshakeError(ConnectionError):
    pass


def accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


class WebSocket:
    """One established connection; send_text/recv_text from one task each."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter, *, mask_outgoing: bool,
                 path: str = "/"):
        self._reader = reader
        self._writer = writer
        self._mask = mask_outgoing
        self.path = path
        self.closed = False

    async def send_text(self, text: str) -> None:
        await self._send_frame(OP_TEXT, text.encode("utf-8"))

    async def recv_text(self) -> Optional[str]:
        """Next text message, or None once the connection is closed."""
        buffer = b""
        in_fragment = False
        while True:
            frame = await self._read_frame()
            if frame is None:
                return None
            fin, opcode, payload = frame
            if opcode == OP_PING:
                await self._send_frame(OP_PONG, payload)
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                await self.close()
                return None
            if opcode in (OP_TEXT, OP_BINARY):
                if in_fragment:
                    raise ConnectionError("new message inside a fragment")
                buffer = payload
                in_fragment = not fin
            elif opcode == OP_CONT:
                if not in_fragment:
                    raise ConnectionError("continuation without a start frame")
                buffer += payload
                if len(buffer) > MAX_FRAME_BYTES:
                    raise ConnectionError("message too large")
                in_fragment = not fin
            else:
                raise ConnectionError(f"unsupported opcode {opcode:#x}")
            if not in_fragment:
                return buffer.decode("utf-8")

    async def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        try:
            await self._send_frame(OP_CLOSE, b"", force=True)
        except (ConnectionError, OSError):
            pass
        try:
            self._writer.close()
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass

    # ------------------------------------------------------------------

    async def _send_frame(self, opcode: int, payload: bytes,
                          force: bool = False) -> None:
        if self.closed and not force:
            raise ConnectionError("websocket is closed")
        head = bytearray([0x80 | opcode])
        n = len(payload)
        mask_bit = 0x80 if self._mask else 0x00
        if n < 126:
            head.append(mask_bit | n)
        elif n < (1 << 16):
            head.append(mask_bit | 126)
            head += n.to_bytes(2, "big")
        else:
            head.append(mask_bit | 127)
            head += n.to_bytes(8, "big")
        if self._mask:
            key = os.urandom(4)
            head += key
            payload = _mask_bytes(payload, key)
        self._writer.write(bytes(head) + payload)
        await self._writer.drain()

    async def _read_frame(self):
        try:
            head = await self._reader.readexactly(2)
        except (asyncio.IncompleteReadError, ConnectionError, OSError):
            self.closed = True
            return None
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        n = head[1] & 0x7F
        try:
            if n == 126:
                n = int.from_bytes(await self._reader.readexactly(2), "big")
            elif n == 127:
                n = int.from_bytes(await self._reader.readexactly(8), "big")
            if n > MAX_FRAME_BYTES:
                raise ConnectionError("frame too large")
            key = await self._reader.readexactly(4) if masked else None
            payload = await self._reader.readexactly(n) if n else b""
        except (asyncio.IncompleteReadError, ConnectionError, OSError):
            self.closed = True
            return None
        if key is not None:
            payload = _mask_bytes(payload, key)
        return fin, opcode, payload


def _mask_bytes(payload: bytes, key: bytes) -> bytes:
    full = key * (len(payload) // 4 + 1)
    return bytes(a ^ b for a, b in zip(payload, full))


# ----------------------------------------------------------------------
# server side

async def _read_request(reader: asyncio.StreamReader):
    request_line = await reader.readline()
    if not request_line:
        raise HandshakeError("empty request")
    parts = request_line.decode("latin-1").split()
    if len(parts) < 3 or parts[0] != "GET":
        raise HandshakeError("not a GET request")
    path = parts[1]
    headers = {}
    while True:
        line = await reader.readline()
        if line in (b"\r\n", b"\n", b""):
            break
        name, _, value = line.decode("latin-1").partition(":")
        headers[name.strip().lower()] = value.strip()
    return path, headers


async def server_handshake(reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> WebSocket:
    path, headers = await _read_request(reader)
    if headers.get("upgrade", "").lower() != "websocket" \
            or "sec-websocket-key" not in headers:
        writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        await writer.drain()
        writer.close()
        raise HandshakeError("not a websocket upgrade request")
    accept = accept_key(headers["sec-websocket-key"])
    writer.write(
        b"HTTP/1.1 101 Switching Protocols\r\n"
        b"Upgrade: websocket\r\n"
        b"Connection: Upgrade\r\n"
        b"Sec-WebSocket-Accept: " + accept.encode("ascii") + b"\r\n\r\n")
    await writer.drain()
    return WebSocket(reader, writer, mask_outgoing=False, path=path)


async def serve(handler: Callable[[WebSocket], Awaitable[None]],
                host: str, port: int) -> asyncio.AbstractServer:
    """Accept websocket connections and run ``handler(ws)`` for each."""

    async def on_connect(reader, writer):
        try:
            ws = await server_handshake(reader, writer)
        except HandshakeError:
            return
        try:
            await handler(ws)
        finally:
            await ws.close()

    return await asyncio.start_server(on_connect, host, port)


# ----------------------------------------------------------------------
# client side

async def connect(uri: str) -> WebSocket:
    """Open ws://host:port/path and complete the client handshake."""
    parsed = urlparse(uri)
    if parsed.scheme != "ws":
        raise HandshakeError(f"unsupported scheme {parsed.scheme!r}")
    host = parsed.hostname or "127.0.0.1"
    port = parsed.port or 80
    path = parsed.path or "/"
    if parsed.query:
        path += "?" + parsed.query
    reader, writer = await asyncio.open_connection(host, port)
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    writer.write(
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n\r\n".encode("latin-1"))
    await writer.drain()
    status = await reader.readline()
    if b"101" not in status:
        writer.close()
        raise HandshakeError(f"handshake rejected: {status!r}")
    expected = accept_key(key)
    ok = False
    while True:
        line = await reader.readline()
        if line in (b"\r\n", b"\n", b""):
            break
        name, _, value = line.decode("latin-1").partition(":")
        if name.strip().lower() == "sec-websocket-accept":
            ok = value.strip() == expected
    if not ok:
        writer.close()
        raise HandshakeError("bad Sec-WebSocket-Accept")
    return WebSocket(reader, writer, mask_outgoing=True, path=path)
