"""fuselab: late fusion of binary detector scores and cross-dataset evaluation."""

__version__ = "0.1.0"

from fuselab.core import (
    MetricsTable,
    RankTable,
    ScorePanel,
    ScoreRecord,
    WeightVector,
    normalize_weights,
    validate_panel,
)
from fuselab.errors import FuselabError, InvariantViolation, ValidationError

__all__ = [
    "__version__",
    "FuselabError",
    "InvariantViolation",
    "MetricsTable",
    "RankTable",
    "ScorePanel",
    "ScoreRecord",
    "ValidationError",
    "WeightVector",
    "normalize_weights",
    "validate_panel",
]
