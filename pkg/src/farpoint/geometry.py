"""Pose math, pointing rays, ray/display intersection, and pixel mapping.

Everything here is a pure function over immutable value types, so it is safe
to call from any thread. Vectors are plain float tuples rather than numpy
arrays because these functions sit on the per-event hot path of the cursor
engine (90 Hz pose streams, millions of events in a simulated study).
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence


class GeometryError(ValueError):
    pass


class InvalidPoseError(GeometryError):
    """Pose matrix is not a rigid transform (rotation block not orthonormal)."""


ORTHONORMAL_TOL = 1e-6


class DevicePose(NamedTuple):
    """Rigid device-to-room transform plus a capture timestamp.

    ``matrix`` is a 4x4 affine transform stored row-major as 16 floats; the
    upper-left 3x3 block must be orthonormal and the bottom row (0,0,0,1).
    ``t_us`` is microseconds since session start.
    """

    matrix: tuple
    t_us: int

    @classmethod
    def from_rows(cls, rows, t_us: int) -> "DevicePose":
        """Build from any 4x4 nested sequence (e.g. a numpy array)."""
        flat = tuple(float(v) for row in rows for v in row)
        if len(flat) != 16:
            raise GeometryError("pose matrix must be 4x4")
        return cls(flat, int(t_us))

    def validate(self) -> None:
        check_rigid_matrix(self.matrix)


class PointingRay(NamedTuple):
    origin: tuple      # (x, y, z) meters, room frame
    direction: tuple   # unit vector, room frame


class PixelPoint(NamedTuple):
    x: float
    y: float


class DisplayPlane(NamedTuple):
    """Wall display geometry in room coordinates plus the pixel grid on it.

    ``u_axis`` points along screen-right, ``v_axis`` along screen-down, both
    unit length and perpendicular. Pixel origin is the top-left corner with y
    growing downward. Horizontal and vertical pixels-per-meter are kept
    independent (bezels make them differ slightly on tiled walls).
    """

    top_left: tuple
    u_axis: tuple
    v_axis: tuple
    width_m: float
    height_m: float
    width_px: int
    height_px: int

    @classmethod
    def build(cls, top_left, u_axis, v_axis, width_m, height_m,
              width_px, height_px) -> "DisplayPlane":
        if width_m <= 0 or height_m <= 0 or width_px <= 0 or height_px <= 0:
            raise GeometryError("display dimensions must be positive")
        u = _normalize3(tuple(float(c) for c in u_axis))
        v = _normalize3(tuple(float(c) for c in v_axis))
        if abs(_dot3(u, v)) > 1e-9:
            raise GeometryError("u_axis and v_axis must be perpendicular")
        return cls(tuple(float(c) for c in top_left), u, v,
                   float(width_m), float(height_m), int(width_px), int(height_px))

    @property
    def px_per_m_x(self) -> float:
        return self.width_px / self.width_m

    @property
    def px_per_m_y(self) -> float:
        return self.height_px / self.height_m

    @property
    def normal(self) -> tuple:
        return _cross3(self.u_axis, self.v_axis)

    @property
    def center_px(self) -> PixelPoint:
        return PixelPoint(self.width_px / 2.0, self.height_px / 2.0)

    def pixel_to_room(self, p) -> tuple:
        """3-D room location of a pixel (any (x, y) pair) on the display."""
        su = p[0] / self.px_per_m_x
        sv = p[1] / self.px_per_m_y
        tl, u, v = self.top_left, self.u_axis, self.v_axis
        return (tl[0] + su * u[0] + sv * v[0],
                tl[1] + su * u[1] + sv * v[1],
                tl[2] + su * u[2] + sv * v[2])

    def clamp(self, p: PixelPoint) -> PixelPoint:
        x = 0.0 if p.x < 0.0 else (self.width_px if p.x > self.width_px else p.x)
        y = 0.0 if p.y < 0.0 else (self.height_px if p.y > self.height_px else p.y)
        return PixelPoint(x, y)

    def contains(self, p: PixelPoint) -> bool:
        return 0.0 <= p.x <= self.width_px and 0.0 <= p.y <= self.height_px


def check_rigid_matrix(m: Sequence[float]) -> None:
    """Raise InvalidPoseError unless ``m`` (row-major 4x4) is a rigid transform.

    Rows of the 3x3 block must be unit length and mutually perpendicular
    within ORTHONORMAL_TOL, and the bottom row must be (0, 0, 0, 1).
    """
    if len(m) != 16:
        raise InvalidPoseError("pose matrix must have 16 entries")
    r0x, r0y, r0z = m[0], m[1], m[2]
    r1x, r1y, r1z = m[4], m[5], m[6]
    r2x, r2y, r2z = m[8], m[9], m[10]
    tol = ORTHONORMAL_TOL
    if (abs(r0x * r0x + r0y * r0y + r0z * r0z - 1.0) > tol
            or abs(r1x * r1x + r1y * r1y + r1z * r1z - 1.0) > tol
            or abs(r2x * r2x + r2y * r2y + r2z * r2z - 1.0) > tol):
        raise InvalidPoseError("rotation rows are not unit length")
    if (abs(r0x * r1x + r0y * r1y + r0z * r1z) > tol
            or abs(r0x * r2x + r0y * r2y + r0z * r2z) > tol
            or abs(r1x * r2x + r1y * r2y + r1z * r2z) > tol):
        raise InvalidPoseError("rotation rows are not perpendicular")
    if m[12] != 0.0 or m[13] != 0.0 or m[14] != 0.0 or m[15] != 1.0:
        raise InvalidPoseError("bottom row must be (0, 0, 0, 1)")


def extract_pose(pose: DevicePose) -> PointingRay:
    """Location and aim ray of a tracked device.

    The origin is the transform applied to the homogeneous origin point; the
    aim is the transform applied to the device's native forward direction
    (0, 0, -1) as a vector (w = 0), renormalized.
    """
    m = pose.matrix
    check_rigid_matrix(m)
    origin = (m[3], m[7], m[11])
    dx, dy, dz = -m[2], -m[6], -m[10]
    norm = math.sqrt(dx * dx + dy * dy + dz * dz)
    return PointingRay(origin, (dx / norm, dy / norm, dz / norm))


PARALLEL_EPS = 1e-9


def intersect(ray: PointingRay, display: DisplayPlane) -> Optional[PixelPoint]:
    """Pixel coordinates where a ray meets the display plane, or None.

    Returns None when the ray is parallel to the plane or the intersection
    lies behind the ray origin. The result is NOT clamped to the display
    bounds; callers decide the clamping policy.
    """
    ox, oy, oz = ray.origin
    dx, dy, dz = ray.direction
    nx, ny, nz = display.normal
    denom = dx * nx + dy * ny + dz * nz
    if -PARALLEL_EPS < denom < PARALLEL_EPS:
        return None
    tlx, tly, tlz = display.top_left
    t = ((tlx - ox) * nx + (tly - oy) * ny + (tlz - oz) * nz) / denom
    if t <= 0.0:
        return None
    hx, hy, hz = ox + t * dx - tlx, oy + t * dy - tly, oz + t * dz - tlz
    u, v = display.u_axis, display.v_axis
    su = hx * u[0] + hy * u[1] + hz * u[2]
    sv = hx * v[0] + hy * v[1] + hz * v[2]
    return PixelPoint(su * display.px_per_m_x, sv * display.px_per_m_y)


def angular_width(width_px: float, distance_m: float, display: DisplayPlane) -> float:
    """Angle in degrees subtended by ``width_px`` seen from ``distance_m``.

    Uses the display's horizontal pixel pitch. width_px == 0 gives 0 degrees.
    """
    if width_px < 0 or distance_m <= 0:
        raise GeometryError("width must be >= 0 and distance > 0")
    half_m = width_px / display.px_per_m_x / 2.0
    return math.degrees(2.0 * math.atan(half_m / distance_m))


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross3(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _normalize3(a):
    n = math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
    if n == 0.0:
        raise GeometryError("zero-length vector")
    return (a[0] / n, a[1] / n, a[2] / n)
