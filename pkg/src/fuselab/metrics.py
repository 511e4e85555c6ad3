"""AUROC, average precision and accuracy for binary labels (1 = fake).

Both area metrics work on tie blocks: samples sharing a score are ranked
together, so results never depend on the input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fuselab.core import MetricEntry, MetricsTable, ScorePanel, validate_panel
from fuselab.errors import (
    BadLabel,
    InvalidThreshold,
    LengthMismatch,
    NonFiniteScore,
    SingleClassDataset,
    ValidationError,
)


@dataclass(frozen=True)
class EvaluationResult:
    auroc: float
    auprc: float
    n_pos: int
    n_neg: int

    def as_entry(self) -> MetricEntry:
        return MetricEntry(self.auroc, self.auprc, self.n_pos, self.n_neg)


@dataclass(frozen=True)
class CurvePoints:
    kind: str
    points: tuple[tuple[float, float], ...]

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def area(self) -> float:
        """Trapezoidal area for ROC, right-continuous step area for PR."""
        x, y = self.x, self.y
        if self.kind == "roc":
            return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))
        return float(np.sum(np.diff(x) * y[1:]))


def _coerce(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.ndim != 1 or s.ndim != 1:
        raise LengthMismatch("labels and scores must be 1-D")
    if y.shape != s.shape:
        raise LengthMismatch(f"{y.shape[0]} labels vs {s.shape[0]} scores")
    if not np.isin(y, (0, 1)).all():
        raise BadLabel("labels must be 0 or 1")
    return y.astype(np.int64), s


def _check_area_inputs(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    y, s = _coerce(labels, scores)
    if not np.isfinite(s).all():
        raise NonFiniteScore("scores must be finite")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise SingleClassDataset(f"need both classes, got {n_pos} positives of {y.size}")
    return y, s


def _tie_blocks(y: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative counts per distinct score, highest score first."""
    # unique sorts ascending; flip for descending thresholds
    _, inverse = np.unique(s, return_inverse=True)
    n_blocks = int(inverse.max()) + 1
    total = np.bincount(inverse, minlength=n_blocks)
    tp = np.bincount(inverse[y == 1], minlength=n_blocks)
    fp = total - tp
    return tp[::-1].astype(np.int64), fp[::-1].astype(np.int64)


def auroc(labels, scores) -> float:
    """Area under the ROC curve, ties counted as one half.

    Equal to the Mann-Whitney probability that a random positive outscores a
    random negative. The numerator is accumulated in exact integers (twice
    the pair count) so the only rounding is the final division.
    """
    y, s = _check_area_inputs(labels, scores)
    tp, fp = _tie_blocks(y, s)
    n_pos, n_neg = int(tp.sum()), int(fp.sum())
    # negatives strictly below each block = total minus those at or above it
    neg_below = n_neg - np.cumsum(fp)
    doubled = int(np.sum(tp * (2 * neg_below + fp)))
    return doubled / (2 * n_pos * n_neg)


def auprc(labels, scores) -> float:
    """Non-interpolated average precision over tie blocks.

    For each distinct score (descending) the recall gained by that block is
    weighted by the precision after the whole block is admitted.
    """
    y, s = _check_area_inputs(labels, scores)
    tp, fp = _tie_blocks(y, s)
    n_pos = int(tp.sum())
    ctp = np.cumsum(tp)
    cfp = np.cumsum(fp)
    keep = tp > 0
    precision = ctp[keep] / (ctp[keep] + cfp[keep])
    return float(np.sum(tp[keep] * precision) / n_pos)


def accuracy(labels, scores, threshold: float = 0.5) -> float:
    """Fraction of samples where ``score >= threshold`` matches ``label == 1``."""
    if not (0.0 < threshold < 1.0):
        raise InvalidThreshold(f"threshold must lie in (0, 1), got {threshold!r}")
    y, s = _coerce(labels, scores)
    if y.size == 0:
        raise LengthMismatch("accuracy of an empty sample set is undefined")
    return float(np.mean((s >= threshold) == (y == 1)))


def _drop_collinear(xs: list[int], ys: list[int]) -> list[int]:
    """Indices of the vertices that remain after merging collinear runs.

    Works on integer counts so collinearity is decided exactly.
    """
    keep = [0]
    for k in range(1, len(xs) - 1):
        a = keep[-1]
        dx1, dy1 = xs[k] - xs[a], ys[k] - ys[a]
        dx2, dy2 = xs[k + 1] - xs[k], ys[k + 1] - ys[k]
        if dx1 * dy2 - dy1 * dx2 != 0:
            keep.append(k)
    keep.append(len(xs) - 1)
    return keep


def curve_points(labels, scores, kind: str = "roc") -> CurvePoints:
    """Curve vertices at tie-block boundaries.

    ``roc`` yields (FPR, TPR) from (0, 0) to (1, 1) with collinear
    intermediate vertices merged; its trapezoidal area equals :func:`auroc`.
    ``pr`` yields (recall, precision) after every block, preceded by the
    conventional (0, 1) anchor; its step area equals :func:`auprc`.
    """
    if kind not in ("roc", "pr"):
        raise ValidationError(f"curve kind must be 'roc' or 'pr', got {kind!r}")
    y, s = _check_area_inputs(labels, scores)
    tp, fp = _tie_blocks(y, s)
    n_pos, n_neg = int(tp.sum()), int(fp.sum())
    ctp = [0] + np.cumsum(tp).tolist()
    cfp = [0] + np.cumsum(fp).tolist()
    if kind == "roc":
        idx = _drop_collinear(cfp, ctp)
        pts = tuple((cfp[k] / n_neg, ctp[k] / n_pos) for k in idx)
    else:
        pts = ((0.0, 1.0),) + tuple(
            (ctp[k] / n_pos, ctp[k] / (ctp[k] + cfp[k])) for k in range(1, len(ctp))
        )
    return CurvePoints(kind, pts)


def evaluate(labels, scores) -> EvaluationResult:
    y, s = _check_area_inputs(labels, scores)
    n_pos = int(y.sum())
    return EvaluationResult(auroc(y, s), auprc(y, s), n_pos, int(y.size - n_pos))


def evaluate_panel(panel: ScorePanel) -> MetricsTable:
    """One AUROC/AUPRC entry per model row, keyed by (model, panel dataset)."""
    validate_panel(panel)
    rows = []
    for model, row in zip(panel.models, panel.scores):
        rows.append((model, panel.dataset, evaluate(panel.labels, row).as_entry()))
    return MetricsTable.from_rows(rows)


def format_curve_csv(curve: CurvePoints, model: str, dataset: str) -> str:
    lines = [f"# kind={curve.kind} model={model} dataset={dataset}", "x,y"]
    lines += [f"{x!r},{y!r}" for x, y in curve.points]
    return "\n".join(lines) + "\n"
