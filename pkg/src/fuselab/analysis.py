"""Cross-dataset rank analysis over a MetricsTable."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from fuselab.core import METRIC_KINDS, MetricsTable, RankTable, check_metric
from fuselab.errors import MissingEntry, ValidationError


def tie_key(value: float) -> float:
    """Value rounded half-even to 12 significant digits.

    Two metric values tie iff their keys are equal.
    """
    return float(format(value, ".11e"))


def competition_ranks(values: Mapping[str, float]) -> dict[str, int]:
    """Competition-min ranks (1, 2, 2, 4), highest value first."""
    keys = {m: tie_key(v) for m, v in values.items()}
    return {m: 1 + sum(other > k for other in keys.values()) for m, k in keys.items()}


def rank_models(table: MetricsTable, dataset: str, metric: str = "auroc") -> dict[str, int]:
    return competition_ranks(table.column(dataset, metric))


def rank_table(table: MetricsTable, metrics: Sequence[str] = METRIC_KINDS) -> RankTable:
    ranks = {}
    for d in table.datasets:
        for metric in metrics:
            ranks[(d, metric)] = rank_models(table, d, metric)
    return RankTable(ranks, datasets=table.datasets)


def worst_models(values: Mapping[str, float]) -> set[str]:
    """Models sharing the minimum value (ties included)."""
    keys = {m: tie_key(v) for m, v in values.items()}
    low = min(keys.values())
    return {m for m, k in keys.items() if k == low}


@dataclass(frozen=True)
class RankShift:
    model: str
    metric: str
    datasets: tuple[str, ...]
    ranks: tuple[int, ...]

    @property
    def max_shift(self) -> int:
        return max(self.ranks) - min(self.ranks)


def rank_shifts(
    table: MetricsTable, metric: str = "auroc", datasets: Sequence[str] | None = None
) -> list[RankShift]:
    """Per-model rank sequences across datasets (bump-chart data).

    Sorted by rank on the first dataset, then model id.
    """
    check_metric(metric)
    order = tuple(datasets) if datasets is not None else table.datasets
    if len(order) < 2:
        raise ValidationError(f"rank shifts need at least 2 datasets, got {len(order)}")
    unknown = [d for d in order if d not in table.datasets]
    if unknown:
        raise MissingEntry(f"datasets not in metrics table: {unknown}")
    per_dataset = [rank_models(table, d, metric) for d in order]
    shifts = [
        RankShift(m, metric, order, tuple(r[m] for r in per_dataset)) for m in table.models
    ]
    return sorted(shifts, key=lambda s: (s.ranks[0], s.model))


@dataclass(frozen=True)
class RobustnessSummary:
    never_worst: frozenset[str]
    ranges: Mapping[str, Mapping[str, float]]
    worst: Mapping[tuple[str, str], frozenset[str]]


def robustness_summary(table: MetricsTable, metrics: Sequence[str] = METRIC_KINDS) -> RobustnessSummary:
    """Which models never attain the worst value in any (dataset, metric) column.

    ``ranges[model][metric]`` is the max-minus-min of that model's values
    across datasets.
    """
    table.require_rectangular()
    worst: dict[tuple[str, str], frozenset[str]] = {}
    ever_worst: set[str] = set()
    for d in table.datasets:
        for metric in metrics:
            w = frozenset(worst_models(table.column(d, metric)))
            worst[(d, metric)] = w
            ever_worst |= w
    ranges = {}
    for m in table.models:
        ranges[m] = {}
        for metric in metrics:
            vals = [table.value(m, d, metric) for d in table.datasets]
            ranges[m][metric] = max(vals) - min(vals)
    return RobustnessSummary(frozenset(table.models) - ever_worst, ranges, worst)
