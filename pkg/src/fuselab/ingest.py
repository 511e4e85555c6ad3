"""Score files, metrics tables and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from fuselab.core import MetricEntry, MetricsTable, ScorePanel, ScoreRecord, validate_panel
from fuselab.errors import (
    BadHeader,
    BadLabel,
    BadScore,
    DuplicateSampleId,
    EmptyIntersection,
    LabelConflict,
    LengthMismatch,
    ManifestError,
    SampleSetMismatch,
    ValidationError,
    ValueOutOfRange,
)

SCORE_HEADER = ("sample_id", "label", "score")
METRICS_HEADER = ("model", "dataset", "auroc", "auprc")
JOIN_POLICIES = ("strict", "drop-missing")
STRATEGIES = ("uniform", "weighted", "both")

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")

# ScoreFileRow carries the same fields and invariants as ScoreRecord
ScoreFileRow = ScoreRecord


def _rows(content: str, header: tuple[str, ...]) -> list[tuple[int, list[str]]]:
    if content.startswith("\ufeff"):
        content = content[1:]
    lines = content.replace("\r\n", "\n").split("\n")
    if not lines or tuple(next(csv.reader([lines[0]]), [])) != header:
        got = lines[0] if lines else ""
        raise BadHeader(f"expected header {','.join(header)!r}, got {got!r}")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = next(csv.reader([line]))
        if len(fields) != len(header):
            raise ValidationError(f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
        out.append((lineno, fields))
    return out


def _decimal(text: str) -> float | None:
    if not _DECIMAL.fullmatch(text):
        return None
    value = float(text)
    return value if math.isfinite(value) else None


def parse_score_file(content: str) -> list[ScoreFileRow]:
    """Parse ``sample_id,label,score`` CSV text into rows.

    Raises:
        BadHeader, BadLabel, BadScore, DuplicateSampleId.
    """
    rows: list[ScoreFileRow] = []
    seen: set[str] = set()
    for lineno, (sid, label, score) in _rows(content, SCORE_HEADER):
        if not sid.strip():
            raise ValidationError(f"line {lineno}: empty sample_id")
        if label not in ("0", "1"):
            raise BadLabel(f"line {lineno}: label must be 0 or 1, got {label!r}")
        value = _decimal(score)
        if value is None or not 0.0 <= value <= 1.0:
            raise BadScore(f"line {lineno}: score must be a decimal in [0, 1], got {score!r}")
        if sid in seen:
            raise DuplicateSampleId(f"line {lineno}: sample_id {sid!r} repeated")
        seen.add(sid)
        rows.append(ScoreFileRow(sid, int(label), value))
    return rows


def parse_score_json(content: str) -> list[ScoreFileRow]:
    """JSON twin of the CSV format: a list of ``{sample_id, label, score}``."""
    try:
        data = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid score JSON: {exc}") from None
    if not isinstance(data, list):
        raise BadHeader("score JSON must be a list of objects")
    rows: list[ScoreFileRow] = []
    seen: set[str] = set()
    for k, item in enumerate(data):
        if not isinstance(item, dict) or set(item) != set(SCORE_HEADER):
            raise BadHeader(f"item {k}: expected keys {SCORE_HEADER}")
        sid, label, score = item["sample_id"], item["label"], item["score"]
        if isinstance(label, bool) or label not in (0, 1):
            raise BadLabel(f"item {k}: label must be 0 or 1, got {label!r}")
        if isinstance(score, bool) or not isinstance(score, (int, float)) or not (
            math.isfinite(score) and 0.0 <= score <= 1.0
        ):
            raise BadScore(f"item {k}: score must be a number in [0, 1], got {score!r}")
        if sid in seen:
            raise DuplicateSampleId(f"item {k}: sample_id {sid!r} repeated")
        seen.add(sid)
        rows.append(ScoreFileRow(str(sid), int(label), float(score)))
    return rows


def format_score_file(rows: Sequence[ScoreRecord]) -> str:
    """Serialize rows as canonical CSV (shortest round-trip floats, LF)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCORE_HEADER)
    for r in rows:
        writer.writerow((r.sample_id, r.label, repr(float(r.score))))
    return buf.getvalue()


@dataclass(frozen=True)
class JoinResult:
    panel: ScorePanel
    dropped: tuple[str, ...] = ()

    @property
    def n_dropped(self) -> int:
        return len(self.dropped)


def join_panels(
    files: Mapping[str, Sequence[ScoreFileRow]], dataset: str, policy: str = "strict"
) -> JoinResult:
    """Merge per-model rows into one panel, samples sorted by id.

    ``files`` maps model id to that model's rows; its iteration order fixes
    the panel's model order. Label disagreement for a shared sample id is
    always fatal. Under ``drop-missing`` samples absent from any file are
    dropped and listed in the result.
    """
    if policy not in JOIN_POLICIES:
        raise ValidationError(f"join policy must be one of {JOIN_POLICIES}, got {policy!r}")
    if len(files) < 2:
        raise LengthMismatch(f"need at least 2 model files, got {len(files)}")
    maps = {m: {r.sample_id: r for r in rows} for m, rows in files.items()}
    labels: dict[str, tuple[str, int]] = {}
    for model, rows in maps.items():
        for sid in sorted(rows):
            lab = rows[sid].label
            if sid in labels and labels[sid][1] != lab:
                first, prev = labels[sid]
                raise LabelConflict(
                    f"sample {sid!r} in {dataset!r}: label {prev} in {first!r} but {lab} in {model!r}"
                )
            labels.setdefault(sid, (model, lab))
    id_sets = [set(rows) for rows in maps.values()]
    union = set().union(*id_sets)
    common = set.intersection(*id_sets)
    if policy == "strict" and common != union:
        for model, ids in zip(maps, id_sets):
            if ids != union:
                missing = sorted(union - ids)
                raise SampleSetMismatch(
                    f"model {model!r} lacks {len(missing)} sample(s) in {dataset!r}, e.g. {missing[:3]}"
                )
    if not common:
        raise EmptyIntersection(f"no sample id is shared by every model file in {dataset!r}")
    sample_ids = sorted(common)
    scores = np.array([[rows[s].score for s in sample_ids] for rows in maps.values()])
    y = np.array([labels[s][1] for s in sample_ids])
    panel = ScorePanel(dataset, tuple(maps), tuple(sample_ids), y, scores)
    return JoinResult(validate_panel(panel), tuple(sorted(union - common)))


def parse_metrics_table(content: str) -> MetricsTable:
    """Parse ``model,dataset,auroc,auprc`` CSV (published-results re-entry)."""
    rows = []
    for lineno, (model, dataset, a, p) in _rows(content, METRICS_HEADER):
        values = []
        for name, text in (("auroc", a), ("auprc", p)):
            v = _decimal(text)
            if v is None or not 0.0 <= v <= 1.0:
                raise ValueOutOfRange(f"line {lineno}: {name} must be a decimal in [0, 1], got {text!r}")
            values.append(v)
        if not model.strip() or not dataset.strip():
            raise ValidationError(f"line {lineno}: empty model or dataset id")
        rows.append((model, dataset, MetricEntry(*values)))
    return MetricsTable.from_rows(rows)


def format_metrics_table(table: MetricsTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for d in table.datasets:
        for m in table.models:
            if (m, d) in table.entries:
                e = table.entries[(m, d)]
                writer.writerow((m, d, repr(e.auroc), repr(e.auprc)))
    return buf.getvalue()


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class DatasetEntry:
    dataset_id: str
    scores: Mapping[str, Path]
    validation: Mapping[str, Path] | None = None


@dataclass(frozen=True)
class RunManifest:
    """Parsed run manifest; every path is already resolved."""

    models: tuple[str, ...]
    datasets: tuple[DatasetEntry, ...]
    base_dir: Path
    validation: Mapping[str, Path] | None = None
    strategy: str = "both"
    weights: str = "auroc"
    threshold: float = 0.5
    join_policy: str = "strict"
    digest: str = ""
    source: Path | None = None
    extra: Mapping[str, object] = field(default_factory=dict)

    def validation_for(self, dataset_id: str) -> Mapping[str, Path] | None:
        for d in self.datasets:
            if d.dataset_id == dataset_id and d.validation is not None:
                return d.validation
        return self.validation

    def relpath(self, path: Path) -> str:
        try:
            return path.resolve().relative_to(self.base_dir.resolve()).as_posix()
        except ValueError:
            return path.as_posix()


def _path_map(obj, models: Sequence[str], base: Path, where: str) -> dict[str, Path]:
    if not isinstance(obj, dict):
        raise ManifestError(f"{where}: expected an object mapping model id to file path")
    missing = [m for m in models if m not in obj]
    unknown = sorted(set(obj) - set(models))
    if missing or unknown:
        raise ManifestError(f"{where}: missing files for {missing}, unknown models {unknown}")
    paths = {}
    for m in models:
        if not isinstance(obj[m], str) or not obj[m]:
            raise ManifestError(f"{where}: path for {m!r} must be a non-empty string")
        paths[m] = base / obj[m]
    return paths


def parse_manifest(content: str, base_dir: Path) -> RunManifest:
    """Build a :class:`RunManifest` from JSON text; paths resolve against ``base_dir``."""
    try:
        data = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    models = data.get("models")
    if not isinstance(models, list) or len(models) < 2 or not all(
        isinstance(m, str) and m.strip() for m in models
    ):
        raise ManifestError("manifest 'models' must list at least 2 non-empty model ids")
    if len(set(models)) != len(models):
        raise ManifestError("manifest 'models' contains duplicates")
    raw_datasets = data.get("datasets")
    if not isinstance(raw_datasets, list) or not raw_datasets:
        raise ManifestError("manifest 'datasets' must be a non-empty list")
    datasets = []
    for k, d in enumerate(raw_datasets):
        if not isinstance(d, dict) or not isinstance(d.get("id"), str) or not d["id"].strip():
            raise ManifestError(f"datasets[{k}] needs a non-empty string 'id'")
        val = d.get("validation")
        datasets.append(
            DatasetEntry(
                d["id"],
                _path_map(d.get("scores"), models, base_dir, f"datasets[{k}].scores"),
                None if val is None else _path_map(val, models, base_dir, f"datasets[{k}].validation"),
            )
        )
    ids = [d.dataset_id for d in datasets]
    if len(set(ids)) != len(ids):
        raise ManifestError("dataset ids must be unique")
    glob_val = data.get("validation")
    fusion = data.get("fusion", {})
    if not isinstance(fusion, dict):
        raise ManifestError("manifest 'fusion' must be an object")
    strategy = fusion.get("strategy", "both")
    if strategy not in STRATEGIES:
        raise ManifestError(f"fusion.strategy must be one of {STRATEGIES}")
    weights = fusion.get("weights", "auroc")
    if not isinstance(weights, str):
        raise ManifestError("fusion.weights must be a string")
    threshold = fusion.get("threshold", 0.5)
    if not isinstance(threshold, (int, float)) or not 0 < threshold < 1:
        raise ManifestError("fusion.threshold must lie in (0, 1)")
    policy = data.get("join_policy", "strict")
    if policy not in JOIN_POLICIES:
        raise ManifestError(f"join_policy must be one of {JOIN_POLICIES}")
    return RunManifest(
        models=tuple(models),
        datasets=tuple(datasets),
        base_dir=base_dir,
        validation=None if glob_val is None else _path_map(glob_val, models, base_dir, "validation"),
        strategy=strategy,
        weights=weights,
        threshold=float(threshold),
        join_policy=policy,
        digest=sha256_bytes(content.encode("utf-8")),
    )


def load_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    raw = path.read_bytes()
    manifest = parse_manifest(raw.decode("utf-8"), path.parent)
    return replace(manifest, digest=sha256_bytes(raw), source=path)


def read_text(path: Path) -> tuple[str, str]:
    """File contents and their sha256 digest."""
    raw = Path(path).read_bytes()
    try:
        return raw.decode("utf-8"), sha256_bytes(raw)
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: not UTF-8 ({exc.reason})") from None


def load_score_file(path: Path) -> tuple[list[ScoreFileRow], str]:
    text, digest = read_text(path)
    try:
        rows = parse_score_json(text) if Path(path).suffix.lower() == ".json" else parse_score_file(text)
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from None
    return rows, digest
