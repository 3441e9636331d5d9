"""Cycle-accurate register-transfer simulation of the five lifting datapaths."""

from dwt97.rtlsim.adders import Word, full_adder, ripple_add, ripple_add_array
from dwt97.rtlsim.model import (
    PUBLISHED_RANGES,
    DesignKind,
    PipelineModel,
    RegisterSpec,
    StageAssignment,
    build_all,
    build_design,
    critical_path,
    stage_schedule,
)
from dwt97.rtlsim.sim import run_cycles, run_stream, step, stream_pairs

__all__ = [
    "PUBLISHED_RANGES",
    "DesignKind",
    "PipelineModel",
    "RegisterSpec",
    "StageAssignment",
    "Word",
    "build_all",
    "build_design",
    "critical_path",
    "full_adder",
    "ripple_add",
    "ripple_add_array",
    "run_cycles",
    "run_stream",
    "stage_schedule",
    "step",
    "stream_pairs",
]
