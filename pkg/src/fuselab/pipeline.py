"""Manifest-driven runs: load, join, fuse, evaluate."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from fuselab.core import MetricsTable, ScorePanel, WeightVector
from fuselab.errors import ManifestError, ValidationError
from fuselab.fusion import (
    ENSEMBLE_AVG,
    ENSEMBLE_WEIGHTED,
    FusionStrategy,
    SkillSource,
    attach_ensembles,
    derive_weights,
    weights_from_mapping,
)
from fuselab.ingest import JoinResult, RunManifest, join_panels, load_score_file, read_text
from fuselab.metrics import evaluate_panel

WEIGHT_ALIASES = {
    "auroc": "auroc-proportional",
    "chance-adjusted": "chance-adjusted-auroc",
    "accuracy": "accuracy-proportional",
}


@dataclass
class RunResult:
    manifest: RunManifest
    joins: dict[str, JoinResult]
    panels: dict[str, ScorePanel]
    weights: dict[str, WeightVector] = field(default_factory=dict)
    digests: dict[str, str] = field(default_factory=dict)
    strategy: str = "both"
    weights_source: str = "auroc"
    metrics: MetricsTable | None = None

    def fusion_info(self) -> dict:
        return {
            "strategy": self.strategy,
            "weights_source": self.weights_source,
            "weights": {
                d: dict(zip(self.manifest.models, w.weights)) for d, w in self.weights.items()
            },
        }


class _Loader:
    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self.digests: dict[str, str] = {}

    def rows(self, path: Path):
        rows, digest = load_score_file(path)
        self.digests[self.manifest.relpath(path)] = digest
        return rows

    def join(self, files: dict[str, Path], dataset: str, policy: str) -> JoinResult:
        return join_panels({m: self.rows(files[m]) for m in self.manifest.models}, dataset, policy)


def skill_source(spec: str, threshold: float = 0.5) -> SkillSource:
    if spec not in WEIGHT_ALIASES:
        raise ValidationError(
            f"weights must be one of {sorted(WEIGHT_ALIASES)} or file:<path>, got {spec!r}"
        )
    return SkillSource(WEIGHT_ALIASES[spec], threshold)


def run(
    manifest: RunManifest,
    *,
    strategy: str | None = None,
    weights: str | None = None,
    join_policy: str | None = None,
    evaluate: bool = True,
) -> RunResult:
    """Join every dataset, attach the requested ensembles, optionally evaluate."""
    strategy = strategy or manifest.strategy
    weights = weights or manifest.weights
    policy = join_policy or manifest.join_policy
    if strategy not in ("uniform", "weighted", "both"):
        raise ValidationError(f"strategy must be uniform, weighted or both, got {strategy!r}")
    loader = _Loader(manifest)
    joins = {d.dataset_id: loader.join(dict(d.scores), d.dataset_id, policy) for d in manifest.datasets}

    weight_vectors: dict[str, WeightVector] = {}
    if strategy in ("weighted", "both"):
        if weights.startswith("file:"):
            path = manifest.base_dir / weights[len("file:"):]
            text, digest = read_text(path)
            loader.digests[manifest.relpath(path)] = digest
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid weights JSON: {exc}") from None
            vec = weights_from_mapping(manifest.models, raw)
            weight_vectors = {d: vec for d in joins}
        else:
            source = skill_source(weights, manifest.threshold)
            cache: dict[int, WeightVector] = {}
            for d in manifest.datasets:
                files = manifest.validation_for(d.dataset_id)
                if files is None:
                    raise ManifestError(
                        f"weighted fusion for {d.dataset_id!r} needs validation score files "
                        "(manifest 'validation') or --weights file:<path>"
                    )
                key = id(files)
                if key not in cache:
                    name = "validation" if files is manifest.validation else f"{d.dataset_id}/validation"
                    cache[key] = derive_weights(loader.join(dict(files), name, policy).panel, source)
                weight_vectors[d.dataset_id] = cache[key]

    panels = {}
    for d, j in joins.items():
        strategies = []
        if strategy in ("uniform", "both"):
            strategies.append((ENSEMBLE_AVG, FusionStrategy("uniform")))
        if strategy in ("weighted", "both"):
            strategies.append((ENSEMBLE_WEIGHTED, FusionStrategy("weighted", weight_vectors[d])))
        panels[d] = attach_ensembles(j.panel, strategies)

    result = RunResult(manifest, joins, panels, weight_vectors, loader.digests, strategy, weights)
    if evaluate:
        table = MetricsTable({})
        for d in manifest.datasets:
            table = table.merge(evaluate_panel(panels[d.dataset_id]))
        result.metrics = table
    return result
