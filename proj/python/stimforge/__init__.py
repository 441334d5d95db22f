"""Stimulus protocols, session logs and marker alignment."""

from .errors import StimforgeError
from ._stimforge import (
    align,
    canonical_flow,
    edge_marker_layout,
    estimate_offset,
    flow_hash,
    pursuit_vectors,
    plan,
    reconstruct,
    resolve_step_settings,
    run_headless,
    score_bfi10,
    score_nasa_tlx,
    score_questionnaire,
    seal_valid,
    simulate_camera,
    validate_flow,
    verify,
)

__all__ = [
    "StimforgeError",
    "align",
    "canonical_flow",
    "edge_marker_layout",
    "estimate_offset",
    "flow_hash",
    "pursuit_vectors",
    "plan",
    "reconstruct",
    "resolve_step_settings",
    "run_headless",
    "score_bfi10",
    "score_nasa_tlx",
    "score_questionnaire",
    "seal_valid",
    "simulate_camera",
    "validate_flow",
    "verify",
]
