"""Distant pointing for wall displays: four techniques (absolute, relative,
hybrid, dual-speed) behind a streaming protocol, a reciprocal-tapping
experiment engine, a deterministic simulated operator, and Fitts'-law
analysis tools.
"""

from .analysis import (ConditionSummary, FittsFit, crossover_id, emit_report,
                       fit_all, fit_fitts, summarize)
from .config import Config, default_config, default_display, load_config
from .engine import (ABSOLUTE, DUAL_SPEED, HYBRID, RELATIVE, TECHNIQUES,
                     Engine, EngineParams, EngineOutput, InputEvent)
from .experiment import (SetRecord, SetSpec, SetState, StudyDesign,
                         TrialRecord, balanced_latin_square, fitts_id,
                         practice_controller)
from .filtering import FilterParams, FilterState, filter_step
from .geometry import (DevicePose, DisplayPlane, PixelPoint, PointingRay,
                       angular_width, extract_pose, intersect)
from .protocol import WireMessage, decode, encode
from .session import SessionRunner, formal_set_plan, verify_replay
from .simulator import (HumanModel, MovementProfile, SimScenario, SimResult,
                        simulate_run, simulate_study)
from .transfer import TransferParams, TransferState, cd_gain, displacement

__version__ = "0.1.0"

__all__ = [
    "ABSOLUTE", "RELATIVE", "HYBRID", "DUAL_SPEED", "TECHNIQUES",
    "Config", "default_config", "default_display", "load_config",
    "DevicePose", "DisplayPlane", "PixelPoint", "PointingRay",
    "extract_pose", "intersect", "angular_width",
    "FilterParams", "FilterState", "filter_step",
    "TransferParams", "TransferState", "cd_gain", "displacement",
    "Engine", "EngineParams", "EngineOutput", "InputEvent",
    "WireMessage", "encode", "decode",
    "SessionRunner", "formal_set_plan", "verify_replay",
    "StudyDesign", "SetSpec", "SetState", "SetRecord", "TrialRecord",
    "fitts_id", "balanced_latin_square", "practice_controller",
    "HumanModel", "MovementProfile", "SimScenario", "SimResult",
    "simulate_run", "simulate_study",
    "ConditionSummary", "FittsFit", "summarize", "fit_fitts", "fit_all",
    "crossover_id", "emit_report",
]
