#!/usr/bin/env python3
"""The four technique state machines, scripted event by event.

Each block feeds a hand-written event sequence to a fresh engine and prints
what the cursor does: absolute tracking, relative taps, the hybrid clutch
timer with its snap-back, and the dual-speed 0.3 slow mode.
"""

from farpoint import Engine, InputEvent
from farpoint.config import default_display
from farpoint.engine import (ABSOLUTE, DUAL_SPEED, HYBRID, PAD_PRESS, POSE,
                             RELATIVE, TOUCH_DOWN, TOUCH_MOVE, TOUCH_UP)
from farpoint.filtering import FilterParams
from farpoint.geometry import DevicePose

display = default_display()
MS = 1000
# near-passthrough filter so positions are easy to read in the transcript
FAST = FilterParams(f_min=1e9, beta=0.0)


def pose_at(px, py, t_us):
    x, y, z = display.pixel_to_room((px, py))
    m = (1.0, 0.0, 0.0, x, 0.0, 1.0, 0.0, y, 0.0, 0.0, 1.0, z + 2.0,
         0.0, 0.0, 0.0, 1.0)
    return InputEvent(t_us, POSE, DevicePose(m, t_us))


def show(engine, out, label):
    click = " CLICK" if out.click else ""
    print(f"  {label:<34} cursor ({out.cursor.x:7.1f}, {out.cursor.y:6.1f})"
          f"  mode {engine.mode:<12}{click}")


print("absolute: the cursor is the filtered ray/display intersection")
eng = Engine(ABSOLUTE, display, filter_params=FAST)
show(eng, eng.handle_event(pose_at(1000, 2175, 0)), "pose at x=1000")
show(eng, eng.handle_event(pose_at(2500, 2175, 11 * MS)), "pose at x=2500")
show(eng, eng.handle_event(InputEvent(20 * MS, PAD_PRESS)), "pad press")

print("\nrelative: finger deltas move the cursor, a quick tap clicks")
eng = Engine(RELATIVE, display)
show(eng, eng.handle_event(InputEvent(0, TOUCH_DOWN, (0.0, 0.0))), "touch down")
show(eng, eng.handle_event(InputEvent(50 * MS, TOUCH_MOVE, (0.01, 0.0))),
     "swipe 10 mm right")
show(eng, eng.handle_event(InputEvent(320 * MS, TOUCH_UP)), "lift (slow: no tap)")
show(eng, eng.handle_event(InputEvent(400 * MS, TOUCH_DOWN, (0.0, 0.0))), "touch down")
show(eng, eng.handle_event(InputEvent(480 * MS, TOUCH_UP)), "lift after 80 ms (tap)")

print("\nhybrid: touching decouples the cursor from the controller")
eng = Engine(HYBRID, display, filter_params=FAST)
show(eng, eng.handle_event(pose_at(3855, 2175, 0)), "pose at center")
show(eng, eng.handle_event(InputEvent(11 * MS, TOUCH_DOWN, (0.0, 0.0))), "touch down")
show(eng, eng.handle_event(pose_at(1000, 2175, 22 * MS)), "pose jumps to x=1000")
show(eng, eng.handle_event(InputEvent(30 * MS, TOUCH_MOVE, (0.0, 0.0))), "finger rests")
show(eng, eng.handle_event(InputEvent(400 * MS, TOUCH_MOVE, (0.004, 0.0))),
     "slow 4 mm drag")
show(eng, eng.handle_event(InputEvent(450 * MS, TOUCH_UP)), "lift: clutch arms")
show(eng, eng.advance_time(849 * MS), "399 ms later (still waiting)")
show(eng, eng.advance_time(850 * MS), "400 ms: snap begins")
t = 850 * MS
while eng.mode != "absolute":
    t += 11 * MS
    out = eng.handle_event(pose_at(1000, 2175, t))
show(eng, out, f"snap done after {(t - 850 * MS) // MS} ms")

print("\ndual-speed: touching anchors the cursor at 0.3x absolute motion")
eng = Engine(DUAL_SPEED, display, filter_params=FAST)
show(eng, eng.handle_event(pose_at(2000, 2175, 0)), "pose at x=2000")
show(eng, eng.handle_event(InputEvent(5 * MS, TOUCH_DOWN, (0.0, 0.0))), "touch down")
show(eng, eng.handle_event(pose_at(2100, 2175, 11 * MS)), "absolute +100 px")
show(eng, eng.handle_event(pose_at(2400, 2175, 22 * MS)), "absolute +300 px more")
show(eng, eng.handle_event(InputEvent(30 * MS, PAD_PRESS)), "pad press")
show(eng, eng.handle_event(InputEvent(40 * MS, TOUCH_UP)), "release: snap back")
