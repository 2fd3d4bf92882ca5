import math
import random

import numpy as np
import pytest

from farpoint.config import default_display
from farpoint.engine import (ABSOLUTE, DUAL_SPEED, HYBRID, MODE_ABSOLUTE,
                             MODE_CLUTCH_WAIT, MODE_RELATIVE, MODE_SLOW,
                             MODE_SNAPPING, PAD_PRESS, POSE, RELATIVE,
                             TOUCH_DOWN, TOUCH_MOVE, TOUCH_UP, TRIGGER_PRESS,
                             Engine, EngineParams, EventOrderError, InputEvent)
from farpoint.filtering import FilterParams
from farpoint.geometry import DevicePose, PixelPoint

DISPLAY = default_display()
MS = 1000
# near-passthrough filter: isolates technique logic from smoothing dynamics
PASSTHROUGH = FilterParams(f_min=1e9, beta=0.0, f_deriv=1.0)


def pose_at(px, py, t_us, dist=2.0):
    """Pure-translation pose whose forward ray hits pixel (px, py) exactly."""
    x, y, z = DISPLAY.pixel_to_room(PixelPoint(px, py))
    m = (1.0, 0.0, 0.0, x,
         0.0, 1.0, 0.0, y,
         0.0, 0.0, 1.0, z + dist,
         0.0, 0.0, 0.0, 1.0)
    return InputEvent(t_us, POSE, DevicePose(m, t_us))


def touch(kind, t_us, x=0.0, y=0.0):
    return InputEvent(t_us, kind, (x, y))


def make_engine(technique, filter_params=PASSTHROUGH, **param_overrides):
    return Engine(technique, DISPLAY, filter_params=filter_params,
                  params=EngineParams(**param_overrides))


# ---------------------------------------------------------------- absolute

def test_absolute_cursor_follows_intersection():
    eng = make_engine(ABSOLUTE)
    out = eng.handle_event(pose_at(1000.0, 800.0, 0))
    assert out.cursor == pytest.approx((1000.0, 800.0), abs=1e-9)
    out = eng.handle_event(pose_at(1200.0, 900.0, 11 * MS))
    assert out.cursor == pytest.approx((1200.0, 900.0), abs=1e-4)


def test_absolute_cursor_is_filtered_then_clamped():
    eng = Engine(ABSOLUTE, DISPLAY, filter_params=FilterParams())
    eng.handle_event(pose_at(100.0, 100.0, 0))
    out = eng.handle_event(pose_at(110.0, 100.0, 11 * MS))
    # a small jitter step is smoothed hard: the cursor moves well under 2 px
    assert 100.0 < out.cursor.x < 102.0


def test_absolute_pad_press_clicks_at_cursor():
    eng = make_engine(ABSOLUTE)
    eng.handle_event(pose_at(500.0, 600.0, 0))
    out = eng.handle_event(InputEvent(10 * MS, PAD_PRESS))
    assert out.click is not None
    pos, t = out.click
    assert pos == pytest.approx((500.0, 600.0), abs=1e-9)
    assert t == 10 * MS
    assert pos == out.cursor


def test_absolute_offscreen_ray_holds_last_location():
    eng = make_engine(ABSOLUTE)
    eng.handle_event(pose_at(500.0, 600.0, 0))
    # parallel ray: no intersection; cursor must not jump
    m = (0.0, 0.0, -1.0, 0.0,
         0.0, 1.0, 0.0, 1.0,
         1.0, 0.0, 0.0, 2.0,
         0.0, 0.0, 0.0, 1.0)
    out = eng.handle_event(InputEvent(11 * MS, POSE, DevicePose(m, 11 * MS)))
    assert out.cursor == pytest.approx((500.0, 600.0), abs=1e-9)


def test_cursor_clamped_to_display():
    eng = make_engine(ABSOLUTE)
    eng.handle_event(pose_at(-500.0, 99999.0, 0))
    assert eng.cursor == (0.0, DISPLAY.height_px)


def test_event_order_enforced():
    eng = make_engine(ABSOLUTE)
    eng.handle_event(pose_at(100.0, 100.0, 50 * MS))
    with pytest.raises(EventOrderError):
        eng.handle_event(pose_at(100.0, 100.0, 10 * MS))


# ---------------------------------------------------------------- relative

def test_relative_tap_clicks():
    eng = make_engine(RELATIVE)
    eng.handle_event(touch(TOUCH_DOWN, 0))
    out = eng.handle_event(touch(TOUCH_UP, 200 * MS))
    assert out.click is not None
    assert out.click[0] == eng.cursor


def test_relative_slow_touch_is_not_a_tap():
    eng = make_engine(RELATIVE)
    eng.handle_event(touch(TOUCH_DOWN, 0))
    assert eng.handle_event(touch(TOUCH_UP, 260 * MS)).click is None


def test_relative_long_travel_is_not_a_tap():
    eng = make_engine(RELATIVE)
    eng.handle_event(touch(TOUCH_DOWN, 0))
    eng.handle_event(touch(TOUCH_MOVE, 50 * MS, 0.004, 0.0))
    eng.handle_event(touch(TOUCH_MOVE, 100 * MS, 0.0, 0.0))
    out = eng.handle_event(touch(TOUCH_UP, 150 * MS))
    assert out.click is None     # 8 mm of travel exceeds the 5 mm slop


def test_relative_moves_cursor_and_ignores_poses():
    eng = make_engine(RELATIVE)
    start = eng.cursor
    eng.handle_event(pose_at(0.0, 0.0, 0))
    assert eng.cursor == start
    eng.handle_event(touch(TOUCH_DOWN, 10 * MS))
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.01, 0.0))
    assert eng.cursor.x > start.x
    assert eng.cursor.y == start.y


def test_relative_pad_press_does_not_click():
    eng = make_engine(RELATIVE)
    assert eng.handle_event(InputEvent(0, PAD_PRESS)).click is None


def test_touch_move_without_touch_ignored():
    eng = make_engine(RELATIVE)
    before = eng.cursor
    out = eng.handle_event(touch(TOUCH_MOVE, 0, 0.05, 0.05))
    assert out.cursor == before


# ---------------------------------------------------------------- hybrid

def hybrid_in_relative(t0=0):
    eng = make_engine(HYBRID)
    eng.handle_event(pose_at(3855.0, 2175.0, t0))
    eng.handle_event(touch(TOUCH_DOWN, t0 + 11 * MS))
    assert eng.mode == MODE_RELATIVE
    return eng


def test_hybrid_touch_enters_relative_and_decouples_poses():
    eng = hybrid_in_relative()
    c0 = eng.cursor
    for i in range(2, 40):
        eng.handle_event(pose_at(3855.0 + 40.0 * i, 2175.0, i * 11 * MS))
    assert eng.cursor == c0      # poses no longer drive the cursor


def test_hybrid_cursor_trajectory_independent_of_poses():
    rng = random.Random(3)
    moves = [(i * 16 + 20, rng.uniform(0, 0.02), rng.uniform(0, 0.02))
             for i in range(30)]

    def run(pose_xs):
        eng = make_engine(HYBRID)
        eng.handle_event(pose_at(3855.0, 2175.0, 0))
        eng.handle_event(touch(TOUCH_DOWN, 10 * MS))
        track = []
        for i, (t_ms, fx, fy) in enumerate(moves):
            eng.handle_event(pose_at(pose_xs(i), 2175.0, (t_ms - 5) * MS))
            eng.handle_event(touch(TOUCH_MOVE, t_ms * MS, fx, fy))
            track.append(eng.cursor)
        return track

    a = run(lambda i: 3855.0)
    b = run(lambda i: 100.0 + 90.0 * i)
    assert a == b


def test_hybrid_click_in_relative_leaves_cursor_unchanged():
    eng = hybrid_in_relative()
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.01, 0.0))
    c0 = eng.cursor
    out = eng.handle_event(InputEvent(40 * MS, PAD_PRESS))
    assert out.click[0] == c0
    assert out.cursor == c0


def test_hybrid_retouch_at_399ms_stays_relative():
    eng = hybrid_in_relative()
    eng.handle_event(touch(TOUCH_UP, 100 * MS))
    assert eng.mode == MODE_CLUTCH_WAIT
    eng.handle_event(touch(TOUCH_DOWN, 499 * MS))
    assert eng.mode == MODE_RELATIVE


def displace_cursor(eng, t0_ms, dx_m=0.009):
    # one slow stroke segment drags the cursor off the absolute location
    eng.handle_event(touch(TOUCH_MOVE, t0_ms * MS, 0.0, 0.0))
    eng.handle_event(touch(TOUCH_MOVE, (t0_ms + 370) * MS, dx_m, 0.0))


def test_hybrid_clutch_expires_at_400ms():
    eng = hybrid_in_relative()
    displace_cursor(eng, 30)
    eng.handle_event(touch(TOUCH_UP, 450 * MS))
    out = eng.advance_time(850 * MS)
    assert eng.mode == MODE_SNAPPING
    assert out.mode_changed


def test_hybrid_retouch_at_401ms_after_snap_began():
    eng = hybrid_in_relative()
    displace_cursor(eng, 30)
    eng.handle_event(touch(TOUCH_UP, 450 * MS))
    eng.advance_time(850 * MS)            # deadline hit exactly at 850 ms
    assert eng.mode == MODE_SNAPPING
    eng.handle_event(touch(TOUCH_DOWN, 851 * MS))
    assert eng.mode == MODE_RELATIVE      # touching during snap re-clutches


def test_hybrid_snap_reaches_absolute_within_300ms():
    eng = hybrid_in_relative()
    # drag the cursor roughly 100 px away from the absolute location
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.0, 0.0))
    eng.handle_event(touch(TOUCH_MOVE, 400 * MS, 0.007, 0.0))
    d0 = abs(eng.cursor.x - eng.absolute_location.x)
    assert 60.0 < d0 < 110.0
    eng.handle_event(touch(TOUCH_UP, 450 * MS))
    snap_start = 850 * MS                 # 450 ms + 400 ms clutch
    t = 450 * MS
    while eng.mode != MODE_ABSOLUTE:
        t += 11 * MS
        eng.handle_event(pose_at(3855.0, 2175.0, t))
        assert t < snap_start + 400 * MS, "snap did not terminate"
    assert t - snap_start <= 300 * MS
    assert eng.cursor == pytest.approx(tuple(eng.absolute_location), abs=1e-9)


def test_hybrid_snap_finishes_when_within_threshold():
    eng = hybrid_in_relative()
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.0, 0.0))
    eng.handle_event(touch(TOUCH_MOVE, 60 * MS, 0.00005, 0.0))  # < 1 px away
    eng.handle_event(touch(TOUCH_UP, 100 * MS))
    eng.advance_time(500 * MS)
    assert eng.mode == MODE_ABSOLUTE


def test_advance_time_idempotent():
    eng = hybrid_in_relative()
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.005, 0.0))
    eng.handle_event(touch(TOUCH_UP, 100 * MS))
    eng.advance_time(600 * MS)
    c1, m1 = eng.cursor, eng.mode
    out = eng.advance_time(600 * MS)
    assert eng.cursor == c1 and eng.mode == m1 and not out.mode_changed


def test_hybrid_snap_instant_option():
    eng = Engine(HYBRID, DISPLAY, filter_params=PASSTHROUGH,
                 params=EngineParams(snap_instant=True))
    eng.handle_event(pose_at(3855.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 10 * MS))
    eng.handle_event(touch(TOUCH_MOVE, 30 * MS, 0.0, 0.0))
    eng.handle_event(touch(TOUCH_MOVE, 300 * MS, 0.01, 0.0))
    eng.handle_event(touch(TOUCH_UP, 350 * MS))
    eng.advance_time(750 * MS)
    assert eng.mode == MODE_ABSOLUTE
    assert eng.cursor == pytest.approx(tuple(eng.absolute_location), abs=1e-9)


# ---------------------------------------------------------------- dual speed

def test_dual_speed_exact_slow_gain():
    eng = make_engine(DUAL_SPEED)
    eng.handle_event(pose_at(2000.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 5 * MS))
    assert eng.mode == MODE_SLOW
    anchor_c = eng.cursor
    anchor_a = eng.absolute_location
    for i, target in enumerate((2100.0, 2450.0, 3000.0, 2800.0)):
        eng.handle_event(pose_at(target, 2175.0, (11 + 11 * i) * MS))
        a = eng.absolute_location
        # bit-exact against the anchored oracle formula
        assert eng.cursor.x == anchor_c.x + 0.3 * (a.x - anchor_a.x)
        assert eng.cursor.y == anchor_c.y + 0.3 * (a.y - anchor_a.y)


def test_dual_speed_hundred_px_moves_thirty():
    eng = make_engine(DUAL_SPEED)
    eng.handle_event(pose_at(2000.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 5 * MS))
    c0, a0 = eng.cursor, eng.absolute_location
    eng.handle_event(pose_at(2100.0, 2175.0, 11 * MS))
    da = eng.absolute_location.x - a0.x
    dc = eng.cursor.x - c0.x
    assert da == pytest.approx(100.0, abs=1e-4)
    assert dc == pytest.approx(0.3 * da, abs=1e-9)


def test_dual_speed_release_snaps_back_to_absolute():
    eng = make_engine(DUAL_SPEED)
    eng.handle_event(pose_at(2000.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 5 * MS))
    eng.handle_event(pose_at(2120.0, 2175.0, 11 * MS))
    eng.handle_event(touch(TOUCH_UP, 20 * MS))
    assert eng.mode == MODE_SNAPPING
    t = 20 * MS
    while eng.mode != MODE_ABSOLUTE and t < 2_000 * MS:
        t += 11 * MS
        eng.handle_event(pose_at(2120.0, 2175.0, t))
    assert eng.mode == MODE_ABSOLUTE
    assert eng.cursor == pytest.approx((2120.0, 2175.0), abs=1e-3)


def test_dual_speed_reanchors_on_every_touch():
    eng = make_engine(DUAL_SPEED)
    eng.handle_event(pose_at(2000.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 5 * MS))
    eng.handle_event(pose_at(2200.0, 2175.0, 11 * MS))
    eng.handle_event(touch(TOUCH_UP, 20 * MS))
    eng.handle_event(touch(TOUCH_DOWN, 30 * MS))
    c0 = eng.cursor
    a0 = eng.absolute_location
    eng.handle_event(pose_at(2300.0, 2175.0, 40 * MS))
    assert eng.cursor.x == c0.x + 0.3 * (eng.absolute_location.x - a0.x)


def test_dual_speed_pad_press_clicks_in_slow_mode():
    eng = make_engine(DUAL_SPEED)
    eng.handle_event(pose_at(2000.0, 2175.0, 0))
    eng.handle_event(touch(TOUCH_DOWN, 5 * MS))
    out = eng.handle_event(InputEvent(10 * MS, PAD_PRESS))
    assert out.click is not None and out.click[0] == eng.cursor


# ---------------------------------------------------------------- buttons

def test_trigger_unbound_by_default():
    eng = make_engine(ABSOLUTE)
    eng.handle_event(pose_at(500.0, 500.0, 0))
    assert eng.handle_event(InputEvent(5 * MS, TRIGGER_PRESS)).click is None


def test_trigger_bindable_as_click():
    eng = make_engine(ABSOLUTE, trigger_clicks=True)
    eng.handle_event(pose_at(500.0, 500.0, 0))
    assert eng.handle_event(InputEvent(5 * MS, TRIGGER_PRESS)).click is not None


# ---------------------------------------------------------------- properties

def random_stream(seed, n=3000):
    rng = random.Random(seed)
    t = 0
    touching = False
    events = []
    for _ in range(n):
        t += rng.randint(1000, 20000)
        r = rng.random()
        if r < 0.55:
            events.append(pose_at(rng.uniform(-2000, 10000),
                                  rng.uniform(-2000, 7000), t))
        elif r < 0.70:
            if touching:
                events.append(touch(TOUCH_MOVE, t, rng.uniform(-0.05, 0.05),
                                    rng.uniform(-0.05, 0.05)))
        elif r < 0.80:
            events.append(touch(TOUCH_DOWN if not touching else TOUCH_UP, t))
            touching = not touching
        elif r < 0.9:
            events.append(InputEvent(t, PAD_PRESS))
        else:
            events.append(InputEvent(t, TOUCH_MOVE, (rng.uniform(-0.1, 0.1),
                                                     rng.uniform(-0.1, 0.1))))
    return events


@pytest.mark.parametrize("technique", [ABSOLUTE, RELATIVE, HYBRID, DUAL_SPEED])
def test_cursor_never_leaves_display(technique):
    eng = Engine(technique, DISPLAY)
    for ev in random_stream(hash(technique) & 0xFFFF):
        out = eng.handle_event(ev)
        assert 0.0 <= out.cursor.x <= DISPLAY.width_px
        assert 0.0 <= out.cursor.y <= DISPLAY.height_px


@pytest.mark.parametrize("technique", [ABSOLUTE, RELATIVE, HYBRID, DUAL_SPEED])
def test_engine_deterministic(technique):
    events = random_stream(99)
    a = Engine(technique, DISPLAY)
    b = Engine(technique, DISPLAY)
    outs_a = [a.handle_event(e) for e in events]
    outs_b = [b.handle_event(e) for e in events]
    assert outs_a == outs_b
