"""Landmark-guided PRM* planning: Poisson-forest environments, PRM* roadmaps,
landmark (ALT) heuristic tables and A* queries."""

from ._lmprm import (
    CalibrationFailure,
    Environment,
    Error,
    FingerprintMismatch,
    FormatError,
    InvalidArgument,
    LandmarkTable,
    RoadmapGraph,
    SamplingFailure,
    SearchResult,
    UnknownObjective,
    bugtrap_environment,
    build_landmark_table,
    build_prm,
    calibrate_intensity,
    clear_probability,
    cli,
    connection_radius,
    heuristic_quality,
    poisson_forest,
    query,
    sssp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
