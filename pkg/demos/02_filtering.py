#!/usr/bin/env python3
"""Why the cursor needs a speed-dependent low-pass filter.

Hand tremor around 10 Hz turns into multi-pixel jitter on a distant wall.
A fixed heavy low-pass would remove it but lag every deliberate movement; a
speed-dependent cutoff smooths hard at rest and opens up when the input
really moves.
"""

import math

from farpoint import FilterParams, FilterState, PixelPoint, filter_step

FS = 90.0


def run(params, signal, seconds):
    state = FilterState()
    out = []
    for i in range(int(seconds * FS)):
        t = i / FS
        out.append(filter_step(state, params, PixelPoint(signal(t), 0.0),
                               round(t * 1e6)).x)
    return out


params = FilterParams()    # 0.25 Hz floor, 0.01 Hz/(px/s) slope, 1 Hz estimator

# 1. tremor suppression: 5 px of 10 Hz jitter collapses to a fraction of a px
jitter = lambda t: 2000.0 + 5.0 * math.sin(2 * math.pi * 10.0 * t)
out = run(params, jitter, 30.0)
tail = out[-900:]
print("10 Hz, 5 px jitter at rest:")
print(f"  raw amplitude      5.000 px")
print(f"  filtered amplitude {(max(tail) - min(tail)) / 2:.3f} px\n")

# 2. a fast sweep passes with little lag: the speed estimate opens the cutoff
sweep = lambda t: 2000.0 * t if t < 2.0 else 4000.0
out = run(params, sweep, 3.0)
mid = int(1.5 * FS)
print("2000 px/s sweep:")
print(f"  raw position at t=1.5 s      {sweep(1.5):7.1f} px")
print(f"  filtered position at t=1.5 s {out[mid]:7.1f} px "
      f"(lag {sweep(1.5) - out[mid]:.1f} px)\n")

# 3. with beta = 0 the same sweep lags far more: that is the tradeoff the
#    speed term exists to break
fixed = FilterParams(beta=0.0)
out = run(fixed, sweep, 3.0)
print("same sweep through a fixed 0.25 Hz low-pass (beta = 0):")
print(f"  filtered position at t=1.5 s {out[mid]:7.1f} px "
      f"(lag {sweep(1.5) - out[mid]:.1f} px)")
