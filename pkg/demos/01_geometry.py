#!/usr/bin/env python3
"""From a tracked pose to a pixel on the wall.

A pose is a 4x4 rigid transform from the device frame to the room frame.
The device points along its own -z axis, so the aim ray is the transform
applied to (0, 0, -1, 0) and the location is the transform applied to
(0, 0, 0, 1). Intersecting that ray with the display plane and scaling by
pixels-per-meter gives the cursor position.
"""

import math

import numpy as np

from farpoint import DevicePose, PointingRay, angular_width, extract_pose, intersect
from farpoint.config import default_display

display = default_display()
print(f"wall display: {display.width_m} x {display.height_m} m, "
      f"{display.width_px} x {display.height_px} px")
print(f"pixel pitch: {display.px_per_m_x:.2f} px/m horizontal, "
      f"{display.px_per_m_y:.2f} px/m vertical\n")

# stand two meters in front of the display center, aim straight ahead
center = np.asarray(display.pixel_to_room(display.center_px))
stand = tuple(float(v) for v in center + np.array([0.0, 0.0, 2.0]))

m = np.eye(4)
m[:3, 3] = stand
pose = DevicePose.from_rows(m, t_us=0)
ray = extract_pose(pose)
print(f"identity-rotation pose at {tuple(round(v, 3) for v in stand)}")
print(f"  origin    {ray.origin}")
print(f"  direction {ray.direction}")
print(f"  hits      {intersect(ray, display)}  (display center)\n")

# rotate the device: yaw left/right sweeps the cursor horizontally
for yaw_deg in (-10, -5, 0, 5, 10):
    c, s = math.cos(math.radians(yaw_deg)), math.sin(math.radians(yaw_deg))
    m = np.eye(4)
    m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
    m[:3, 3] = stand
    hit = intersect(extract_pose(DevicePose.from_rows(m, 0)), display)
    print(f"  yaw {yaw_deg:+3d} deg -> x = {hit.x:8.1f} px")

print("\nangular size of the studied target widths from 2 m:")
for w in (25, 50, 100):
    print(f"  {w:>3} px -> {angular_width(w, 2.0, display):.3f} deg")
