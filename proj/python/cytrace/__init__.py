"""Cell tracking toolkit: simulation, Siamese similarity training, frame-to-frame
tracking with mitosis detection, and lineage-graph evaluation metrics."""

from ._cytrace import (
    DimensionError,
    ParseError,
    ValidationError,
    encode_positions,
    evaluate,
    pair_score,
    scenario_names,
    simulate,
    track,
    train,
)

__all__ = [
    "DimensionError",
    "ParseError",
    "ValidationError",
    "encode_positions",
    "evaluate",
    "pair_score",
    "scenario_names",
    "simulate",
    "track",
    "train",
]
