"""Reciprocal-tapping task engine: stimuli, sets, trials, practice.

A *set* is seven successful alternating clicks on two vertical bars; the
first click starts the timer, so a set yields six timed trials. A miss
flashes the target, invalidates the trial in progress, and leaves the target
unchanged until it is hit. Conditions cross target width and movement
amplitude; their order is counterbalanced with a balanced Latin square.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .engine import TECHNIQUES
from .geometry import DisplayPlane, PixelPoint


class ExperimentError(ValueError):
    pass


def fitts_id(amplitude: float, width: float) -> float:
    """Index of difficulty in bits: log2(A/W + 1)."""
    if amplitude <= 0 or width <= 0:
        raise ExperimentError("amplitude and width must be positive")
    return math.log2(amplitude / width + 1.0)


def balanced_latin_square(n: int) -> List[List[int]]:
    """Condition orders (1-based) balancing first-order carryover.

    Each row is a permutation of 1..n and each condition appears exactly once
    per column of the base square. For even n every ordered adjacency pair
    occurs exactly once across the n rows; for odd n the n rows are followed
    by their reversals (2n rows), giving every ordered pair exactly twice.
    """
    if n < 1:
        raise ExperimentError("n must be >= 1")
    if n == 1:
        return [[1]]
    rows = []
    for r in range(n):
        row = []
        lo, hi = 0, 1
        # interleave 0, +1, -1, +2, -2, ... around the row offset
        for j in range(n):
            if j % 2 == 0:
                row.append((r + lo) % n + 1)
                lo -= 1
            else:
                row.append((r + hi) % n + 1)
                hi += 1
        rows.append(row)
    if n % 2 == 1:
        rows.extend([list(reversed(row)) for row in list(rows)])
    return rows


# ----------------------------------------------------------------------
# design

DEFAULT_WIDTHS = (25, 50, 100)
DEFAULT_AMPLITUDES = (1000, 3000, 5000)


@dataclass(frozen=True)
class PracticeRules:
    amplitude_px: float = 3000.0
    widths_px: Tuple[float, float] = (25.0, 50.0)
    accuracy_threshold: float = 0.90
    window_sets: int = 2


@dataclass(frozen=True)
class StudyDesign:
    techniques: Tuple[str, ...] = TECHNIQUES
    widths: Tuple[float, ...] = DEFAULT_WIDTHS
    amplitudes: Tuple[float, ...] = DEFAULT_AMPLITUDES
    sets_per_condition: int = 3
    participant_index: int = 0
    technique_order_seed: Optional[int] = None
    practice: PracticeRules = PracticeRules()

    def __post_init__(self):
        if any(w <= 0 for w in self.widths) or any(a <= 0 for a in self.amplitudes):
            raise ExperimentError("widths and amplitudes must be positive")
        for w in self.widths:
            for a in self.amplitudes:
                if w >= a:
                    raise ExperimentError(
                        f"width {w} must be smaller than amplitude {a}")

    def conditions(self) -> List[Tuple[float, float]]:
        """(width, amplitude) pairs in this participant's Latin-square order."""
        cross = [(w, a) for w in self.widths for a in self.amplitudes]
        square = balanced_latin_square(len(cross))
        row = square[self.participant_index % len(square)]
        return [cross[i - 1] for i in row]

    def technique_order(self) -> List[str]:
        """Technique order, shuffled when a seed is set (seed is recorded)."""
        order = list(self.techniques)
        if self.technique_order_seed is not None:
            random.Random(self.technique_order_seed).shuffle(order)
        return order

    def all_ids(self) -> List[float]:
        return sorted(fitts_id(a, w) for w in self.widths for a in self.amplitudes)


@dataclass(frozen=True)
class SetSpec:
    technique: str
    width_px: float
    amplitude_px: float
    set_index: int = 0
    practice: bool = False

    def bar_centers(self, display: DisplayPlane) -> Tuple[float, float]:
        cx = display.width_px / 2.0
        return (cx - self.amplitude_px / 2.0, cx + self.amplitude_px / 2.0)

    def validate_on_display(self, display: DisplayPlane) -> None:
        left, right = self.bar_centers(display)
        if left - self.width_px / 2.0 < 0 or right + self.width_px / 2.0 > display.width_px:
            raise ExperimentError("bars do not fit on the display")

    @property
    def id_bits(self) -> float:
        return fitts_id(self.amplitude_px, self.width_px)


# ----------------------------------------------------------------------
# per-set state machine

CLICKS_PER_SET = 7
TRIALS_PER_SET = CLICKS_PER_SET - 1


@dataclass
class TrialRecord:
    set_id: int
    trial_index: int                  # 1..6
    t_start_us: int
    t_end_us: int
    click_position: Tuple[float, float]
    error_clicks: List[Tuple[Tuple[float, float], int]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.error_clicks

    @property
    def rt_s(self) -> float:
        return (self.t_end_us - self.t_start_us) * 1e-6


@dataclass
class SetRecord:
    spec: SetSpec
    trials: List[TrialRecord]
    lead_in_errors: List[Tuple[Tuple[float, float], int]] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return sum(1 for t in self.trials if t.valid) / len(self.trials)

    @property
    def valid_rts_s(self) -> List[float]:
        return [t.rt_s for t in self.trials if t.valid]

    @property
    def median_rt_s(self) -> Optional[float]:
        rts = sorted(self.valid_rts_s)
        if not rts:
            return None
        k = len(rts)
        mid = k // 2
        return rts[mid] if k % 2 else (rts[mid - 1] + rts[mid]) / 2.0


# handle_click outcomes
TRIAL_ADVANCE = "trial_advance"
ERROR_FEEDBACK = "error_feedback"
SET_COMPLETE = "set_complete"


@dataclass
class ClickOutcome:
    kind: str
    hit: bool
    target: str                       # target bar for the NEXT click
    trial_index: int                  # trial the click belonged to (0 = lead-in)
    record: Optional[SetRecord] = None


class SetState:
    """Bookkeeping for one running set. Drive with handle_click()."""

    def __init__(self, spec: SetSpec, display: DisplayPlane,
                 first_target: str = "left"):
        spec.validate_on_display(display)
        self.spec = spec
        self.display = display
        left, right = spec.bar_centers(display)
        self._centers = {"left": left, "right": right}
        self.target = first_target
        self.hits = 0
        self._hit_times: List[int] = []
        self._hit_positions: List[Tuple[float, float]] = []
        self._pending_errors: List[Tuple[Tuple[float, float], int]] = []
        self.lead_in_errors: List[Tuple[Tuple[float, float], int]] = []
        self._trials: List[TrialRecord] = []
        self.complete = False

    @property
    def target_center_x(self) -> float:
        return self._centers[self.target]

    def target_contains(self, p: PixelPoint) -> bool:
        half = self.spec.width_px / 2.0
        c = self._centers[self.target]
        return c - half <= p.x <= c + half

    def handle_click(self, position: PixelPoint, t_us: int) -> ClickOutcome:
        if self.complete:
            raise ExperimentError("set already complete")
        pos = (position[0], position[1])
        if not self.target_contains(position):
            if self.hits == 0:
                self.lead_in_errors.append((pos, t_us))
            else:
                self._pending_errors.append((pos, t_us))
            return ClickOutcome(ERROR_FEEDBACK, False, self.target, self.hits)

        self.hits += 1
        self._hit_times.append(t_us)
        self._hit_positions.append(pos)
        if self.hits > 1:
            trial = TrialRecord(
                set_id=self.spec.set_index,
                trial_index=self.hits - 1,
                t_start_us=self._hit_times[-2],
                t_end_us=t_us,
                click_position=pos,
                error_clicks=self._pending_errors,
            )
            self._pending_errors = []
            self._trials.append(trial)
        self.target = "right" if self.target == "left" else "left"

        if self.hits == CLICKS_PER_SET:
            self.complete = True
            record = SetRecord(self.spec, self._trials,
                               lead_in_errors=self.lead_in_errors)
            return ClickOutcome(SET_COMPLETE, True, self.target,
                                self.hits - 1, record)
        return ClickOutcome(TRIAL_ADVANCE, True, self.target, self.hits - 1)


# ----------------------------------------------------------------------
# practice-to-criterion

CONTINUE_PRACTICE = "continue_practice"
READY = "ready"


def practice_controller(history: Sequence[SetRecord],
                        rules: PracticeRules = PracticeRules(),
                        technique: str = "absolute"):
    """Decide whether practice may stop, and if not, what to run next.

    Returns (READY, None) once pooled accuracy over the last ``window_sets``
    completed sets reaches the threshold; otherwise (CONTINUE_PRACTICE, spec)
    where spec alternates the practice widths at the fixed practice amplitude.
    """
    window = rules.window_sets
    if len(history) >= window:
        recent = history[-window:]
        valid = sum(1 for rec in recent for t in rec.trials if t.valid)
        total = sum(len(rec.trials) for rec in recent)
        if total and valid / total >= rules.accuracy_threshold:
            return READY, None
    width = rules.widths_px[len(history) % len(rules.widths_px)]
    spec = SetSpec(technique=technique, width_px=width,
                   amplitude_px=rules.amplitude_px,
                   set_index=len(history), practice=True)
    return CONTINUE_PRACTICE, spec
