"""Speed-dependent low-pass filter for the absolute-pointing cursor.

A single-pole low-pass per axis whose cutoff rises linearly with an estimate
of the cursor speed: near-stationary input is smoothed hard (suppressing hand
tremor around 10 Hz), fast sweeps pass almost unfiltered (keeping lag low).
The speed estimate is itself low-passed at a fixed cutoff so single-sample
spikes do not blow the cutoff open, and it is smoothed *signed* before taking
the magnitude; zero-mean jitter therefore averages out instead of inflating
the cutoff, which is what makes tremor suppression effective at rest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import PixelPoint


class FilterOrderError(ValueError):
    """Samples must arrive with strictly increasing timestamps."""


@dataclass(frozen=True)
class FilterParams:
    f_min: float = 0.25     # Hz, cutoff at zero speed
    beta: float = 0.01      # Hz per (px/s), cutoff slope
    f_deriv: float = 1.0    # Hz, fixed cutoff of the speed estimator

    def __post_init__(self):
        if self.f_min <= 0 or self.beta < 0 or self.f_deriv <= 0:
            raise ValueError("require f_min > 0, beta >= 0, f_deriv > 0")


class FilterState:
    """Mutable filter memory: owned by one pipeline, updated sequentially."""

    __slots__ = ("x", "y", "vx", "vy", "last_t_us", "initialized")

    def __init__(self):
        self.x = 0.0
        self.y = 0.0
        self.vx = 0.0   # smoothed signed px/s
        self.vy = 0.0
        self.last_t_us = 0
        self.initialized = False

    @property
    def last_output(self) -> PixelPoint:
        return PixelPoint(self.x, self.y)

    def copy(self) -> "FilterState":
        s = FilterState()
        s.x, s.y, s.vx, s.vy = self.x, self.y, self.vx, self.vy
        s.last_t_us, s.initialized = self.last_t_us, self.initialized
        return s


_TWO_PI = 6.283185307179586


def filter_step(state: FilterState, params: FilterParams,
                raw: PixelPoint, t_us: int) -> PixelPoint:
    """Feed one raw sample at ``t_us`` microseconds; return the smoothed point.

    The first sample passes through unchanged and seeds the state. Afterwards,
    per axis:

        v     <- v + a_d * (delta/dt - v)          (speed estimate, signed)
        f_c   =  f_min + beta * |v|
        alpha =  dt / (dt + 1/(2*pi*f_c))
        out   <- out + alpha * (raw - out)

    where delta is measured against the previous output and a_d is the same
    alpha formula evaluated at f_deriv. The dt-dependent alpha keeps the
    response correct under irregular sample intervals.
    """
    rx = raw[0]
    ry = raw[1]
    if not state.initialized:
        state.x = rx
        state.y = ry
        state.last_t_us = t_us
        state.initialized = True
        return PixelPoint(rx, ry)
    if t_us <= state.last_t_us:
        raise FilterOrderError(
            f"timestamp {t_us} not after previous {state.last_t_us}")
    dt = (t_us - state.last_t_us) * 1e-6
    state.last_t_us = t_us

    a_d = dt / (dt + 1.0 / (_TWO_PI * params.f_deriv))
    vx = state.vx + a_d * ((rx - state.x) / dt - state.vx)
    vy = state.vy + a_d * ((ry - state.y) / dt - state.vy)
    state.vx = vx
    state.vy = vy

    fcx = params.f_min + params.beta * (vx if vx >= 0.0 else -vx)
    fcy = params.f_min + params.beta * (vy if vy >= 0.0 else -vy)
    ax = dt / (dt + 1.0 / (_TWO_PI * fcx))
    ay = dt / (dt + 1.0 / (_TWO_PI * fcy))
    x = state.x + ax * (rx - state.x)
    y = state.y + ay * (ry - state.y)
    state.x = x
    state.y = y
    return PixelPoint(x, y)
