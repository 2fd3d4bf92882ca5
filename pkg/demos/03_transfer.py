#!/usr/bin/env python3
"""The sigmoid speed-to-gain curve behind relative pointing.

Slow finger motion gets a gain near 1 for pixel-precise nudges; fast motion
saturates near cd_max so one swipe can cross a 7710 px wall. The trackpad
(hybrid) configuration caps at 50, the tablet (relative) one at 200.
"""

from farpoint import TransferParams, TransferState, cd_gain, displacement
from farpoint.config import default_display

hybrid = TransferParams(cd_max=50.0)
tablet = TransferParams(cd_max=200.0)
display = default_display()

print(f"{'finger speed':>14}{'gain (cd_max=50)':>18}{'gain (cd_max=200)':>19}")
for speed in (0.0, 0.02, 0.05, 0.1, 0.25, 0.4, 0.6, 1.0, 2.0):
    print(f"{speed:>11.2f} m/s{cd_gain(hybrid, speed):>18.1f}"
          f"{cd_gain(tablet, speed):>19.1f}")

print("\none 40 mm swipe at different speeds (tablet configuration):")
for dur_ms in (800, 400, 200, 100):
    state = TransferState()
    displacement(state, tablet, (0.0, 0.0), 0, display)
    moved = 0.0
    steps = max(2, dur_ms // 16)
    for i in range(1, steps + 1):
        dx, _ = displacement(state, tablet, (0.04 * i / steps, 0.0),
                             round(i * dur_ms * 1000 / steps), display)
        moved += dx
    print(f"  {dur_ms:>4} ms swipe ({0.04 / (dur_ms / 1000):4.2f} m/s avg) "
          f"-> {moved:7.0f} px")
