"""Cell-trajectory smoothing, random-motion statistics and velocity-field reconstruction."""

from ._core import (
    DEFAULT_FRAME_INTERVAL,
    DEFAULT_PIXEL_SIZE,
    BoundaryContactError,
    Error,
    EvolutionParams,
    InsufficientDataError,
    InvalidInputError,
    NonConvergenceError,
    brownian_ensemble,
    detect_intersections,
    detect_self_intersections,
    eamsd,
    eatamsd,
    extract_by_self_intersection,
    figure_eight,
    fit_hurst,
    reconstruct,
    run_cli,
    smooth,
    tamsd,
    triple_loop,
    velocities,
)

__all__ = [name for name in dir() if not name.startswith("_")]
