"""Prioritized task-stack inverse kinematics (native kernel bindings)."""

from ._core import (
    BenchError,
    ChainModel,
    LimitSet,
    ModelError,
    NumericalError,
    Solver,
    TaskError,
    Transform,
    build_default_scenario,
    compute_scale_factor,
    damped_pinv,
    forward_kinematics,
    geometric_jacobian,
    parse_model,
    pose_error,
    summarize,
)

__all__ = [
    "BenchError",
    "ChainModel",
    "LimitSet",
    "ModelError",
    "NumericalError",
    "Solver",
    "TaskError",
    "Transform",
    "build_default_scenario",
    "compute_scale_factor",
    "damped_pinv",
    "forward_kinematics",
    "geometric_jacobian",
    "parse_model",
    "pose_error",
    "summarize",
]
