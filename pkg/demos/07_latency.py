#!/usr/bin/env python3
"""Measuring one-way event latency through the streaming server.

The harness round-trips timestamped probes through an echo endpoint and
reports half the round-trip time at the 50th/90th/99th percentiles. A
synthetic constant-delay transport with a virtual clock validates the
arithmetic exactly; the real measurement then runs over a loopback
websocket. The deployment target is a p90 under 2 ms.
"""

import asyncio

from farpoint import wsock
from farpoint.config import default_config
from farpoint.server import (ConstantDelayTransport, SessionServer,
                             WebSocketTransport, measure_latency)


async def main():
    synthetic = ConstantDelayTransport(one_way_us=1000.0)
    report = await measure_latency(synthetic, 1000, clock=synthetic.clock)
    print("synthetic transport with an exact 1.000 ms one-way delay:")
    print(f"  p50 {report.p50_us / 1000:.3f} ms   p90 {report.p90_us / 1000:.3f} ms"
          f"   p99 {report.p99_us / 1000:.3f} ms")

    server = SessionServer(default_config())
    await server.start("127.0.0.1", 0)
    ws = await wsock.connect(f"ws://127.0.0.1:{server.port}/echo")
    report = await measure_latency(WebSocketTransport(ws), 5000)
    await ws.close()
    await server.stop()
    print(f"\nloopback websocket, {report.count} probes:")
    print(f"  p50 {report.p50_us / 1000:.3f} ms   p90 {report.p90_us / 1000:.3f} ms"
          f"   p99 {report.p99_us / 1000:.3f} ms")
    verdict = "meets" if report.p90_us < 2000 else "MISSES"
    print(f"  {verdict} the 2 ms p90 target")


if __name__ == "__main__":
    asyncio.run(main())
