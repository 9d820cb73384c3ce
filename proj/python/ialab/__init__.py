"""Interference alignment simulation toolkit."""

from ._core import (
    decode_feedback,
    dof_limits,
    encode_feedback,
    feedback_bit_count,
    optimal_power_split,
    run_alignment,
    run_experiment,
    run_power_control,
    sample_channels,
)

__all__ = [
    "decode_feedback",
    "dof_limits",
    "encode_feedback",
    "feedback_bit_count",
    "optimal_power_split",
    "run_alignment",
    "run_experiment",
    "run_power_control",
    "sample_channels",
]
