import math

import numpy as np
import pytest

from farpoint.geometry import (DevicePose, DisplayPlane, GeometryError,
                               InvalidPoseError, PixelPoint, PointingRay,
                               angular_width, extract_pose, intersect)

IDENTITY = (1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0)


def pose_with(rotation=None, translation=(0.0, 0.0, 0.0), t_us=0):
    r = np.eye(3) if rotation is None else np.asarray(rotation, float)
    m = np.eye(4)
    m[:3, :3] = r
    m[:3, 3] = translation
    return DevicePose.from_rows(m, t_us)


def rot_y(deg):
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return [[c, 0, s], [0, 1, 0], [-s, 0, c]]


# ---------------------------------------------------------------- oracle

def intersect_oracle(display, origin, direction):
    """Straightforward numpy ray/plane computation, kept independent of the
    implementation under test."""
    origin = np.asarray(origin, float)
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    u = np.asarray(display.u_axis)
    v = np.asarray(display.v_axis)
    n = np.cross(u, v)
    denom = float(np.dot(d, n))
    if abs(denom) < 1e-9:
        return None
    t = float(np.dot(np.asarray(display.top_left) - origin, n)) / denom
    if t <= 0:
        return None
    local = origin + t * d - np.asarray(display.top_left)
    return (float(np.dot(local, u)) * display.width_px / display.width_m,
            float(np.dot(local, v)) * display.height_px / display.height_m)


# ---------------------------------------------------------------- poses

def test_identity_pose_points_down_negative_z():
    ray = extract_pose(DevicePose(IDENTITY, 0))
    assert ray.origin == (0.0, 0.0, 0.0)
    assert ray.direction == (0.0, 0.0, -1.0)


def test_pure_translation_keeps_direction():
    ray = extract_pose(pose_with(translation=(1.0, 2.0, 3.0)))
    assert ray.origin == (1.0, 2.0, 3.0)
    assert ray.direction == (0.0, 0.0, -1.0)


def test_rotation_90_about_y():
    # hand-applied: Ry(90) @ (0, 0, -1) = (-1, 0, 0)
    ray = extract_pose(pose_with(rotation=rot_y(90.0)))
    assert ray.direction == pytest.approx((-1.0, 0.0, 0.0), abs=1e-12)


def test_extract_pose_direction_is_unit_for_random_rotations():
    rng = np.random.default_rng(7)
    for _ in range(200):
        q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        ray = extract_pose(pose_with(rotation=q, translation=rng.normal(size=3)))
        assert math.hypot(*ray.direction) == pytest.approx(1.0, abs=1e-9)


def test_non_orthonormal_pose_rejected():
    m = list(IDENTITY)
    m[0] = 1.5
    with pytest.raises(InvalidPoseError):
        extract_pose(DevicePose(tuple(m), 0))


def test_bad_bottom_row_rejected():
    m = list(IDENTITY)
    m[15] = 0.0
    with pytest.raises(InvalidPoseError):
        DevicePose(tuple(m), 0).validate()


# ---------------------------------------------------------------- intersection

def center_origin(display, dist=2.0):
    c = np.asarray(display.pixel_to_room(display.center_px))
    n = np.asarray(display.normal)
    return c - n * dist     # normal is (0, 0, -1); origin sits at z = +dist


def test_center_ray_hits_display_center(display):
    o = center_origin(display)
    hit = intersect(PointingRay(tuple(o), (0.0, 0.0, -1.0)), display)
    assert hit == (3855.0, 2175.0)


def test_offset_target_example(display):
    # aim from 2 m in front of center at the point 1 m right, 0.5 m above
    o = center_origin(display)
    target = np.asarray(display.pixel_to_room(display.center_px)) \
        + np.array([1.0, 0.5, 0.0])
    d = target - o
    hit = intersect(PointingRay(tuple(o), tuple(d / np.linalg.norm(d))), display)
    assert hit.x == pytest.approx(5735.487804878049, abs=1e-6)
    assert hit.y == pytest.approx(1233.4415584415583, abs=1e-6)
    assert intersect_oracle(display, o, d) == pytest.approx((hit.x, hit.y))


def test_parallel_ray_returns_none(display):
    o = center_origin(display)
    assert intersect(PointingRay(tuple(o), (1.0, 0.0, 0.0)), display) is None


def test_hit_behind_origin_returns_none(display):
    o = center_origin(display)
    assert intersect(PointingRay(tuple(o), (0.0, 0.0, 1.0)), display) is None


def test_intersection_may_leave_bounds_unclamped(display):
    o = center_origin(display)
    hit = intersect(PointingRay(tuple(o), (0.9, 0.0, -0.4359)), display)
    assert hit is not None and hit.x > display.width_px


def test_matches_oracle_on_random_rays(display):
    rng = np.random.default_rng(11)
    o = center_origin(display)
    for _ in range(300):
        d = rng.normal(size=3)
        got = intersect(PointingRay(tuple(o), tuple(d / np.linalg.norm(d))),
                        display)
        want = intersect_oracle(display, o, d)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-6)


def test_round_trip_pixel_ray_pixel(display):
    # any in-bounds pixel, seen from an arbitrary off-plane origin, comes
    # back to itself within 1e-6 px
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        p = PixelPoint(rng.uniform(0, display.width_px),
                       rng.uniform(0, display.height_px))
        origin = np.array([rng.uniform(-2, 2), rng.uniform(0.3, 2.6),
                           rng.uniform(0.5, 4.0)])
        target = np.asarray(display.pixel_to_room(p))
        d = target - origin
        hit = intersect(PointingRay(tuple(origin),
                                    tuple(d / np.linalg.norm(d))), display)
        assert hit is not None
        assert hit.x == pytest.approx(p.x, abs=1e-6)
        assert hit.y == pytest.approx(p.y, abs=1e-6)


def test_translation_parallel_to_plane_shifts_pixels(display):
    o = center_origin(display)
    d = np.array([0.05, -0.02, -1.0])
    base = intersect(PointingRay(tuple(o), tuple(d)), display)
    shifted = intersect(PointingRay(tuple(o + np.array([0.25, -0.1, 0.0])),
                                    tuple(d)), display)
    assert shifted.x - base.x == pytest.approx(0.25 * display.px_per_m_x, rel=1e-9)
    assert shifted.y - base.y == pytest.approx(0.1 * display.px_per_m_y, rel=1e-9)


def test_direction_scaling_invariance(display):
    o = center_origin(display)
    d = (0.1, 0.05, -1.0)
    a = intersect(PointingRay(tuple(o), d), display)
    b = intersect(PointingRay(tuple(o), tuple(3.7 * c for c in d)), display)
    assert a == pytest.approx(b, abs=1e-9)


# ---------------------------------------------------------------- clamping

def test_clamp(display):
    assert display.clamp(PixelPoint(-5.0, 99999.0)) == (0.0, display.height_px)
    assert display.clamp(PixelPoint(12.5, 80.0)) == (12.5, 80.0)


# ---------------------------------------------------------------- angles

def test_angular_width_of_studied_targets(display):
    # stated conversions are 0.37 and 0.73 degrees; direct computation from
    # the display dimensions lands within 0.05 of both
    assert angular_width(25, 2.0, display) == pytest.approx(0.37, abs=0.05)
    assert angular_width(50, 2.0, display) == pytest.approx(0.73, abs=0.05)
    # frozen exact values from the independent computation
    assert angular_width(25, 2.0, display) == pytest.approx(0.38085575718714965)
    assert angular_width(50, 2.0, display) == pytest.approx(0.7617031004864306)


def test_angular_width_zero_and_errors(display):
    assert angular_width(0.0, 2.0, display) == 0.0
    with pytest.raises(GeometryError):
        angular_width(25, 0.0, display)
    with pytest.raises(GeometryError):
        angular_width(-1.0, 2.0, display)


def test_display_build_validation():
    with pytest.raises(GeometryError):
        DisplayPlane.build((0, 0, 0), (1, 0, 0), (1, 0, 0), 1, 1, 10, 10)
    with pytest.raises(GeometryError):
        DisplayPlane.build((0, 0, 0), (1, 0, 0), (0, -1, 0), 0, 1, 10, 10)
