"""Deterministic markdown/JSON reports and plot-data files."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from fuselab import __version__
from fuselab.analysis import (
    RankShift,
    RobustnessSummary,
    rank_shifts,
    rank_table,
    robustness_summary,
)
from fuselab.core import METRIC_KINDS, MetricEntry, MetricsTable, RankTable
from fuselab.errors import ValidationError

LABELS = {"auroc": "AUROC", "auprc": "AUPRC"}


@dataclass(frozen=True)
class ReportBundle:
    metrics: MetricsTable
    ranks: RankTable
    shifts: Mapping[str, Sequence[RankShift]]
    robustness: RobustnessSummary
    provenance: Mapping[str, object]
    fusion: Mapping[str, object] | None = field(default=None)


def build_provenance(
    files: Mapping[str, str], manifest_digest: str | None = None, **extra: object
) -> dict:
    prov = {
        "tool": "fuselab",
        "version": __version__,
        "files": dict(sorted(files.items())),
    }
    if manifest_digest is not None:
        prov["manifest_sha256"] = manifest_digest
    prov.update(extra)
    return prov


def build_bundle(
    table: MetricsTable, provenance: Mapping[str, object], fusion: Mapping[str, object] | None = None
) -> ReportBundle:
    table.require_rectangular()
    shifts = {}
    if len(table.datasets) >= 2:
        shifts = {m: rank_shifts(table, m) for m in METRIC_KINDS}
    return ReportBundle(
        metrics=table,
        ranks=rank_table(table),
        shifts=shifts,
        robustness=robustness_summary(table),
        provenance=provenance,
        fusion=fusion,
    )


def model_order(bundle: ReportBundle) -> list[str]:
    """Models by AUROC rank on the first dataset, ties by id."""
    first = bundle.ranks.get(bundle.metrics.datasets[0], "auroc")
    return sorted(bundle.metrics.models, key=lambda m: (first[m], m))


def _cell(text: str) -> str:
    return text.replace("|", "\\|")


def render_markdown(bundle: ReportBundle) -> str:
    table = bundle.metrics
    datasets = table.datasets
    models = model_order(bundle)
    out = ["# Fusion evaluation report", "", "## Metrics", ""]
    header = ["Model"] + [f"{LABELS[k]} ({d})" for d in datasets for k in METRIC_KINDS]
    out.append("| " + " | ".join(_cell(h) for h in header) + " |")
    out.append("|" + "---|" + "---:|" * (len(header) - 1))
    for m in models:
        cells = [_cell(m)]
        for d in datasets:
            for k in METRIC_KINDS:
                text = f"{table.value(m, d, k):.3f}"
                if bundle.ranks.get(d, k)[m] == 1:
                    text = f"**{text}**"
                cells.append(text)
        out.append("| " + " | ".join(cells) + " |")
    out += ["", "Bold marks the best value in each column; tied values are all bold.", ""]

    for k in METRIC_KINDS:
        shifts = bundle.shifts.get(k)
        if not shifts:
            continue
        out += [f"## Rank shifts ({LABELS[k]})", ""]
        out.append("| Model | " + " | ".join(_cell(d) for d in datasets) + " | Max shift |")
        out.append("|---|" + "---:|" * (len(datasets) + 1))
        for s in shifts:
            ranks = " | ".join(str(r) for r in s.ranks)
            out.append(f"| {_cell(s.model)} | {ranks} | {s.max_shift} |")
        out.append("")

    rob = bundle.robustness
    out += ["## Robustness", ""]
    never = [m for m in models if m in rob.never_worst]
    out.append("Never worst in any (dataset, metric) column: " + (", ".join(never) if never else "none"))
    out.append("")
    for d in datasets:
        for k in METRIC_KINDS:
            worst = sorted(rob.worst[(d, k)])
            out.append(f"- worst {LABELS[k]} on {d}: {', '.join(worst)}")
    out += ["", "| Model | AUROC range | AUPRC range |", "|---|---:|---:|"]
    for m in models:
        r = rob.ranges[m]
        out.append(f"| {_cell(m)} | {r['auroc']:.3f} | {r['auprc']:.3f} |")
    out.append("")

    if bundle.fusion:
        out += ["## Fusion", ""]
        out.append(f"Strategy: {bundle.fusion.get('strategy')}; weights: {bundle.fusion.get('weights_source')}")
        weights = bundle.fusion.get("weights") or {}
        if weights:
            members = list(next(iter(weights.values())))
            out += ["", "| Dataset | " + " | ".join(_cell(m) for m in members) + " |"]
            out.append("|---|" + "---:|" * len(members))
            for d, w in weights.items():
                out.append(f"| {_cell(d)} | " + " | ".join(f"{w[m]:.4f}" for m in members) + " |")
        out.append("")

    prov = bundle.provenance
    out += ["## Provenance", "", f"- tool: {prov.get('tool')} {prov.get('version')}"]
    if "manifest_sha256" in prov:
        out.append(f"- manifest sha256: `{prov['manifest_sha256']}`")
    for path, digest in prov.get("files", {}).items():
        out.append(f"- `{path}` sha256 `{digest}`")
    out.append("")
    return "\n".join(out)


def robustness_dict(rob: RobustnessSummary, models: Sequence[str]) -> dict:
    return {
        "never_worst": sorted(rob.never_worst),
        "ranges": {
            m: {f"{k}_range": rob.ranges[m][k] for k in METRIC_KINDS} for m in models
        },
    }


def bundle_to_dict(bundle: ReportBundle) -> dict:
    table = bundle.metrics
    metrics: dict = {}
    for d in table.datasets:
        metrics[d] = {}
        for m in table.models:
            e = table.get(m, d)
            entry = {"auroc": e.auroc, "auprc": e.auprc}
            if e.n_pos is not None:
                entry["n_pos"] = e.n_pos
                entry["n_neg"] = e.n_neg
            metrics[d][m] = entry
    ranks = {
        d: {k: bundle.ranks.get(d, k) for k in METRIC_KINDS} for d in table.datasets
    }
    shifts = {
        k: [{"model": s.model, "ranks": list(s.ranks), "max_shift": s.max_shift} for s in v]
        for k, v in bundle.shifts.items()
    }
    rob = robustness_dict(bundle.robustness, table.models)
    rob["worst"] = {
        d: {k: sorted(bundle.robustness.worst[(d, k)]) for k in METRIC_KINDS} for d in table.datasets
    }
    out = {
        "models": list(table.models),
        "datasets": list(table.datasets),
        "metrics": metrics,
        "ranks": ranks,
        "tie_policy": bundle.ranks.tie_policy,
        "rank_shifts": shifts,
        "robustness": rob,
        "provenance": dict(bundle.provenance),
    }
    if bundle.fusion is not None:
        out["fusion"] = dict(bundle.fusion)
    return out


def canonical_json(obj: object) -> str:
    """Sorted keys, two-space indent, shortest round-trip floats, LF endings."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_json(bundle: ReportBundle) -> str:
    return canonical_json(bundle_to_dict(bundle))


def bundle_from_json(text: str) -> ReportBundle:
    """Rebuild a bundle from :func:`render_json` output."""
    data = json.loads(text)
    try:
        datasets = tuple(data["datasets"])
        models = tuple(data["models"])
        entries = {}
        for d in datasets:
            for m in models:
                e = data["metrics"][d][m]
                entries[(m, d)] = MetricEntry(e["auroc"], e["auprc"], e.get("n_pos"), e.get("n_neg"))
        table = MetricsTable(entries, models, datasets)
        ranks = RankTable(
            {(d, k): data["ranks"][d][k] for d in datasets for k in METRIC_KINDS},
            data["tie_policy"],
            datasets,
        )
        shifts = {
            k: [RankShift(s["model"], k, datasets, tuple(s["ranks"])) for s in v]
            for k, v in data["rank_shifts"].items()
        }
        rob = data["robustness"]
        robustness = RobustnessSummary(
            frozenset(rob["never_worst"]),
            {m: {k: rob["ranges"][m][f"{k}_range"] for k in METRIC_KINDS} for m in models},
            {(d, k): frozenset(rob["worst"][d][k]) for d in datasets for k in METRIC_KINDS},
        )
        return ReportBundle(table, ranks, shifts, robustness, data["provenance"], data.get("fusion"))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"not a fuselab report: missing {exc}") from None


def bump_chart_csv(bundle: ReportBundle) -> str:
    """Long-format ``model,metric,dataset,rank`` rows for bump charts."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("model", "metric", "dataset", "rank"))
    for k in METRIC_KINDS:
        for m in model_order(bundle):
            for d in bundle.metrics.datasets:
                writer.writerow((m, k, d, bundle.ranks.get(d, k)[m]))
    return buf.getvalue()


def ranks_csv(bundle: ReportBundle) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("dataset", "metric", "model", "rank"))
    for d in bundle.metrics.datasets:
        for k in METRIC_KINDS:
            col = bundle.ranks.get(d, k)
            for m in sorted(col, key=lambda m: (col[m], m)):
                writer.writerow((d, k, m, col[m]))
    return buf.getvalue()


def robustness_json(bundle: ReportBundle) -> str:
    return canonical_json(robustness_dict(bundle.robustness, bundle.metrics.models))
