"""Counting knight's tours: exact backtracking and randomized-Warnsdorff sampling."""

from ._backend import NAME as BACKEND
from .board import Board, Square, SymmetryTransform, StartClass, TRANSFORMS
from .board import apply_transform, knight_moves, start_classes
from .exact import (
    ExactLimitError,
    TourKind,
    count_closed_diagrams,
    count_closed_numberings_from,
    count_open_numberings,
    count_open_numberings_from,
    exact_violation_histogram,
)
from .sampler import (
    BatchResult,
    SamplerConfig,
    TourSample,
    free_degree,
    run_batch,
    run_experiment,
    sample_tour,
    step_distribution,
)
from .stats import (
    Estimate,
    QuantityKind,
    confidence_interval,
    estimate_closed_diagrams,
    estimate_numberings,
    estimate_violation_histogram,
    to_geometric,
)

__all__ = [
    "BACKEND", "Board", "Square", "SymmetryTransform", "StartClass", "TRANSFORMS",
    "apply_transform", "knight_moves", "start_classes", "ExactLimitError", "TourKind",
    "count_closed_diagrams", "count_closed_numberings_from", "count_open_numberings",
    "count_open_numberings_from", "exact_violation_histogram", "BatchResult",
    "SamplerConfig", "TourSample", "free_degree", "run_batch", "run_experiment",
    "sample_tour", "step_distribution", "Estimate", "QuantityKind",
    "confidence_interval", "estimate_closed_diagrams", "estimate_numberings",
    "estimate_violation_histogram", "to_geometric",
]
