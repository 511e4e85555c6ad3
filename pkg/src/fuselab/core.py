"""Shared domain types and validation primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from fuselab.errors import (
    AllZeroWeights,
    BadLabel,
    DuplicateEntry,
    DuplicateSampleId,
    LengthMismatch,
    MissingCell,
    MissingEntry,
    NameCollision,
    NegativeWeight,
    ScoreOutOfRange,
    SingleClassDataset,
    ValidationError,
    ValueOutOfRange,
)

METRIC_KINDS = ("auroc", "auprc")
TIE_POLICY = "competition-min"
WEIGHT_SUM_TOL = 1e-12


def _check_id(name: str, what: str) -> str:
    if not isinstance(name, str) or not name.strip():
        raise ValidationError(f"{what} must be a non-empty string, got {name!r}")
    return name


def check_metric(metric: str) -> str:
    if metric not in METRIC_KINDS:
        raise ValidationError(f"unknown metric {metric!r}; expected one of {METRIC_KINDS}")
    return metric


@dataclass(frozen=True)
class ScoreRecord:
    """One sample's label (1 = fake) and one model's fake-probability."""

    sample_id: str
    label: int
    score: float

    def __post_init__(self) -> None:
        _check_id(self.sample_id, "sample_id")
        if self.label not in (0, 1) or isinstance(self.label, bool):
            raise BadLabel(f"label for {self.sample_id!r} must be 0 or 1, got {self.label!r}")
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ScoreOutOfRange(f"score for {self.sample_id!r} not in [0, 1]: {self.score!r}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ScorePanel:
    """Models x samples score matrix for a single dataset.

    ``scores[i, j]`` is model ``models[i]``'s probability that sample
    ``sample_ids[j]`` is fake. Missing cells are encoded as NaN and rejected
    by :func:`validate_panel`. Arrays are stored read-only.
    """

    dataset: str
    models: tuple[str, ...]
    sample_ids: tuple[str, ...]
    labels: np.ndarray
    scores: np.ndarray

    def __post_init__(self) -> None:
        _check_id(self.dataset, "dataset id")
        models = tuple(self.models)
        sample_ids = tuple(self.sample_ids)
        for m in models:
            _check_id(m, "model id")
        labels = np.asarray(self.labels)
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise LengthMismatch(f"scores must be 2-D (models x samples), got ndim={scores.ndim}")
        if scores.shape != (len(models), len(sample_ids)):
            raise LengthMismatch(
                f"scores shape {scores.shape} does not match "
                f"{len(models)} models x {len(sample_ids)} samples"
            )
        if labels.shape != (len(sample_ids),):
            raise LengthMismatch(f"{labels.shape[0] if labels.ndim else 0} labels for {len(sample_ids)} samples")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "sample_ids", sample_ids)
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))
        object.__setattr__(self, "scores", _frozen(scores))

    @property
    def n_models(self) -> int:
        return len(self.models)

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)

    def row(self, model: str) -> np.ndarray:
        try:
            return self.scores[self.models.index(model)]
        except ValueError:
            raise MissingEntry(f"model {model!r} not in panel {self.dataset!r}") from None

    def subset(self, models: Sequence[str]) -> "ScorePanel":
        """Panel restricted to ``models`` in the given order."""
        idx = []
        for m in models:
            if m not in self.models:
                raise MissingEntry(f"model {m!r} not in panel {self.dataset!r}")
            idx.append(self.models.index(m))
        return ScorePanel(self.dataset, tuple(models), self.sample_ids, self.labels, self.scores[idx])

    def records(self, model: str) -> list[ScoreRecord]:
        row = self.row(model)
        return [
            ScoreRecord(sid, int(lab), float(s))
            for sid, lab, s in zip(self.sample_ids, self.labels, row)
        ]

    def same_data(self, other: "ScorePanel") -> bool:
        return (
            self.dataset == other.dataset
            and self.models == other.models
            and self.sample_ids == other.sample_ids
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.scores, other.scores, equal_nan=True)
        )


def validate_panel(panel: ScorePanel) -> ScorePanel:
    """Check every panel invariant and return the panel unchanged.

    Raises:
        NameCollision: duplicate model ids.
        DuplicateSampleId: a sample id occurs twice.
        BadLabel: a label outside {0, 1}.
        MissingCell: a NaN (hole) in the score matrix.
        ScoreOutOfRange: an infinite score or one outside [0, 1].
        SingleClassDataset: labels are all 0 or all 1.
    """
    if len(set(panel.models)) != panel.n_models:
        dupes = sorted({m for m in panel.models if panel.models.count(m) > 1})
        raise NameCollision(f"duplicate model ids in panel {panel.dataset!r}: {dupes}")
    if panel.n_models < 1:
        raise ValidationError(f"panel {panel.dataset!r} has no models")
    if len(set(panel.sample_ids)) != panel.n_samples:
        seen: set[str] = set()
        for sid in panel.sample_ids:
            if sid in seen:
                raise DuplicateSampleId(f"sample id {sid!r} repeated in panel {panel.dataset!r}")
            seen.add(sid)
    bad = ~np.isin(panel.labels, (0, 1))
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise BadLabel(f"label {panel.labels[j]} for sample {panel.sample_ids[j]!r} is not 0/1")
    holes = np.isnan(panel.scores)
    if holes.any():
        i, j = (int(k) for k in np.argwhere(holes)[0])
        raise MissingCell(f"no score for model {panel.models[i]!r}, sample {panel.sample_ids[j]!r}")
    out = ~((panel.scores >= 0.0) & (panel.scores <= 1.0))
    if out.any():
        i, j = (int(k) for k in np.argwhere(out)[0])
        raise ScoreOutOfRange(
            f"score {panel.scores[i, j]!r} for model {panel.models[i]!r}, "
            f"sample {panel.sample_ids[j]!r} outside [0, 1]"
        )
    n_pos = int(panel.labels.sum())
    if n_pos == 0 or n_pos == panel.n_samples:
        raise SingleClassDataset(
            f"panel {panel.dataset!r} needs both classes; got {n_pos} positives of {panel.n_samples}"
        )
    return panel


@dataclass(frozen=True)
class WeightVector:
    """Non-negative per-model weights summing to one."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        if any(not math.isfinite(x) for x in w):
            raise ValidationError(f"weights must be finite: {w}")
        if any(x < 0 for x in w):
            raise NegativeWeight(f"negative weight in {w}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[float]:
        return iter(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


def normalize_weights(raw: Sequence[float]) -> WeightVector:
    """Scale non-negative raw weights so they sum to one.

    >>> normalize_weights([2, 1, 1]).weights
    (0.5, 0.25, 0.25)
    """
    values = [float(x) for x in raw]
    if len(values) < 2:
        raise LengthMismatch(f"need at least 2 weights, got {len(values)}")
    if any(not math.isfinite(x) for x in values):
        raise ValidationError(f"weights must be finite: {values}")
    if any(x < 0 for x in values):
        raise NegativeWeight(f"negative raw weight in {values}")
    total = math.fsum(values)
    if total <= 0:
        raise AllZeroWeights("all raw weights are zero")
    return WeightVector(tuple(x / total for x in values))


@dataclass(frozen=True)
class MetricEntry:
    auroc: float
    auprc: float
    n_pos: int | None = None
    n_neg: int | None = None

    def __post_init__(self) -> None:
        for name in METRIC_KINDS:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueOutOfRange(f"{name} must be a finite value in [0, 1], got {v!r}")
            object.__setattr__(self, name, float(v))

    def get(self, metric: str) -> float:
        return getattr(self, check_metric(metric))


@dataclass(frozen=True)
class MetricsTable:
    """AUROC/AUPRC per (model, dataset), shaped like a results table.

    ``models`` and ``datasets`` record first-appearance order; the table may
    be ragged, in which case the analysis functions raise ``MissingEntry``.
    """

    entries: Mapping[tuple[str, str], MetricEntry]
    models: tuple[str, ...] = ()
    datasets: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        entries = dict(self.entries)
        models = list(self.models)
        datasets = list(self.datasets)
        for (m, d) in entries:
            _check_id(m, "model id")
            _check_id(d, "dataset id")
            if m not in models:
                models.append(m)
            if d not in datasets:
                datasets.append(d)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "models", tuple(models))
        object.__setattr__(self, "datasets", tuple(datasets))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, MetricEntry]]) -> "MetricsTable":
        entries: dict[tuple[str, str], MetricEntry] = {}
        for model, dataset, entry in rows:
            key = (model, dataset)
            if key in entries:
                raise DuplicateEntry(f"duplicate entry for model {model!r} on dataset {dataset!r}")
            entries[key] = entry
        return cls(entries)

    def get(self, model: str, dataset: str) -> MetricEntry:
        try:
            return self.entries[(model, dataset)]
        except KeyError:
            raise MissingEntry(f"no metrics for model {model!r} on dataset {dataset!r}") from None

    def value(self, model: str, dataset: str, metric: str) -> float:
        return self.get(model, dataset).get(metric)

    def column(self, dataset: str, metric: str) -> dict[str, float]:
        """All models' values for one (dataset, metric), in model order."""
        check_metric(metric)
        if dataset not in self.datasets:
            raise MissingEntry(f"dataset {dataset!r} not in metrics table")
        return {m: self.value(m, dataset, metric) for m in self.models}

    @property
    def is_rectangular(self) -> bool:
        return all((m, d) in self.entries for m in self.models for d in self.datasets)

    def require_rectangular(self) -> None:
        for d in self.datasets:
            for m in self.models:
                self.get(m, d)

    def merge(self, other: "MetricsTable") -> "MetricsTable":
        rows = [(m, d, e) for (m, d), e in self.entries.items()]
        rows += [(m, d, e) for (m, d), e in other.entries.items()]
        merged = MetricsTable.from_rows(rows)
        models = list(self.models) + [m for m in other.models if m not in self.models]
        datasets = list(self.datasets) + [d for d in other.datasets if d not in self.datasets]
        return MetricsTable(merged.entries, tuple(models), tuple(datasets))


@dataclass(frozen=True)
class RankTable:
    """Competition-min ranks per (dataset, metric); rank 1 is best."""

    ranks: Mapping[tuple[str, str], Mapping[str, int]]
    tie_policy: str = TIE_POLICY
    datasets: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.tie_policy != TIE_POLICY:
            raise ValidationError(f"unsupported tie policy {self.tie_policy!r}")
        ranks = {k: dict(v) for k, v in self.ranks.items()}
        for key, col in ranks.items():
            if any(r < 1 for r in col.values()):
                raise ValidationError(f"ranks must be >= 1 in column {key}")
        object.__setattr__(self, "ranks", ranks)
        if not self.datasets:
            ds: list[str] = []
            for d, _ in ranks:
                if d not in ds:
                    ds.append(d)
            object.__setattr__(self, "datasets", tuple(ds))

    def get(self, dataset: str, metric: str) -> dict[str, int]:
        try:
            return dict(self.ranks[(dataset, metric)])
        except KeyError:
            raise MissingEntry(f"no ranks for dataset {dataset!r}, metric {metric!r}") from None
