"""Probability-level late fusion: uniform and skill-weighted averaging."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fuselab.core import ScorePanel, WeightVector, normalize_weights, validate_panel
from fuselab.errors import (
    DegenerateSkills,
    LengthMismatch,
    NameCollision,
    ValidationError,
)
from fuselab.metrics import accuracy, auroc

UNIFORM = "uniform"
WEIGHTED = "weighted"
SKILL_KINDS = ("auroc-proportional", "chance-adjusted-auroc", "accuracy-proportional", "user-supplied")
CHANCE_FLOOR = 1e-6

ENSEMBLE_AVG = "ensemble-avg"
ENSEMBLE_WEIGHTED = "ensemble-weighted"


@dataclass(frozen=True)
class FusionStrategy:
    kind: str
    weights: WeightVector | None = None

    def __post_init__(self) -> None:
        if self.kind not in (UNIFORM, WEIGHTED):
            raise ValidationError(f"fusion kind must be {UNIFORM!r} or {WEIGHTED!r}, got {self.kind!r}")
        if self.kind == WEIGHTED and self.weights is None:
            raise ValidationError("weighted fusion requires a weight vector")
        if self.kind == UNIFORM and self.weights is not None:
            raise ValidationError("uniform fusion takes no weights")


@dataclass(frozen=True)
class SkillSource:
    kind: str = "auroc-proportional"
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in SKILL_KINDS:
            raise ValidationError(f"unknown skill source {self.kind!r}; expected one of {SKILL_KINDS}")
        if not (0.0 < self.threshold < 1.0):
            raise ValidationError(f"accuracy threshold must lie in (0, 1), got {self.threshold!r}")


def _weighted_sum(scores: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    # left-to-right accumulation in model order; do not reorder
    acc = weights[0] * scores[0]
    for w, row in zip(weights[1:], scores[1:]):
        acc = acc + w * row
    # rounding can push a convex combination an ulp past its members
    return np.clip(acc, scores.min(axis=0), scores.max(axis=0))


def fuse_weighted(panel: ScorePanel, w: WeightVector) -> np.ndarray:
    """Per-sample ``sum_i w_i * p_i(x)`` over the panel's model rows."""
    if len(w) != panel.n_models:
        raise LengthMismatch(f"{len(w)} weights for {panel.n_models} models")
    validate_panel(panel)
    return _weighted_sum(panel.scores, w.weights)


def uniform_weights(n: int) -> WeightVector:
    return normalize_weights([1.0] * n)


def fuse_uniform(panel: ScorePanel) -> np.ndarray:
    """Per-sample mean of the model rows.

    Routed through the weighted accumulator with ``w_i = 1/N`` so the result
    is bit-identical to ``fuse_weighted(panel, uniform_weights(N))``.
    """
    return fuse_weighted(panel, uniform_weights(panel.n_models))


def fuse(panel: ScorePanel, strategy: FusionStrategy) -> np.ndarray:
    if strategy.kind == UNIFORM:
        return fuse_uniform(panel)
    return fuse_weighted(panel, strategy.weights)


def raw_skills(validation_panel: ScorePanel, source: SkillSource) -> list[float]:
    """Per-model skill before normalization."""
    validate_panel(validation_panel)
    y = validation_panel.labels
    if source.kind == "auroc-proportional":
        return [auroc(y, row) for row in validation_panel.scores]
    if source.kind == "chance-adjusted-auroc":
        excess = [auroc(y, row) - 0.5 for row in validation_panel.scores]
        if all(e <= 0 for e in excess):
            raise DegenerateSkills(
                f"no model beats chance on validation panel {validation_panel.dataset!r}"
            )
        return [max(e, CHANCE_FLOOR) for e in excess]
    if source.kind == "accuracy-proportional":
        skills = [accuracy(y, row, source.threshold) for row in validation_panel.scores]
        if all(s <= 0 for s in skills):
            raise DegenerateSkills("every model has zero validation accuracy")
        return skills
    raise ValidationError("user-supplied weights are not derived from a validation panel")


def derive_weights(validation_panel: ScorePanel, source: SkillSource | None = None) -> WeightVector:
    """Skill weights from held-out scores, normalized to sum to one.

    ``auroc-proportional`` uses each model's AUROC; ``chance-adjusted-auroc``
    uses ``max(AUROC - 0.5, 1e-6)``; ``accuracy-proportional`` uses accuracy
    at ``source.threshold``.
    """
    source = source or SkillSource()
    return normalize_weights(raw_skills(validation_panel, source))


def weights_from_mapping(models: Sequence[str], raw: dict[str, float] | Sequence[float]) -> WeightVector:
    """User-supplied weights, given per model name or positionally."""
    if isinstance(raw, dict):
        unknown = sorted(set(raw) - set(models))
        missing = [m for m in models if m not in raw]
        if unknown or missing:
            raise LengthMismatch(f"weights file mismatch: missing {missing}, unknown {unknown}")
        values = [raw[m] for m in models]
    else:
        values = list(raw)
        if len(values) != len(models):
            raise LengthMismatch(f"{len(values)} weights for {len(models)} models")
    return normalize_weights(values)


def attach_ensembles(
    panel: ScorePanel, strategies: Sequence[tuple[str, FusionStrategy]]
) -> ScorePanel:
    """Append one fused row per strategy; member rows are left untouched.

    Every strategy fuses the original member rows only, never earlier
    ensemble rows.
    """
    validate_panel(panel)
    if not strategies:
        return panel
    names = list(panel.models)
    rows = [panel.scores]
    for name, strategy in strategies:
        if name in names:
            raise NameCollision(f"ensemble name {name!r} already used in panel {panel.dataset!r}")
        names.append(name)
        rows.append(fuse(panel, strategy)[np.newaxis, :])
    return ScorePanel(panel.dataset, tuple(names), panel.sample_ids, panel.labels, np.vstack(rows))
