"""``fuselab`` command line.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from fuselab import __version__
from fuselab.core import METRIC_KINDS, MetricsTable
from fuselab.errors import InvariantViolation, ValidationError
from fuselab.ingest import (
    format_metrics_table,
    format_score_file,
    load_manifest,
    parse_metrics_table,
    read_text,
)
from fuselab.metrics import curve_points, format_curve_csv
from fuselab.pipeline import run
from fuselab.report import (
    build_bundle,
    build_provenance,
    bump_chart_csv,
    canonical_json,
    ranks_csv,
    render_json,
    render_markdown,
    robustness_json,
)
from fuselab.synth import SynthSpec, generate_panel

log = logging.getLogger("fuselab")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _add_run_options(p: argparse.ArgumentParser, table_mode: bool = False) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", type=Path, help="run manifest (JSON)")
    if table_mode:
        src.add_argument(
            "--metrics-table", type=Path,
            help="CSV with model,dataset,auroc,auprc; skips raw scores entirely",
        )
    p.add_argument("--out-dir", type=Path, help="directory for output files")
    p.add_argument("--join-policy", choices=("strict", "drop-missing"))
    p.add_argument("--strategy", choices=("uniform", "weighted", "both"))
    p.add_argument("--weights", help="auroc | chance-adjusted | accuracy | file:<path>")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuselab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fuselab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and join every score file in a manifest")
    _add_run_options(p)

    p = sub.add_parser("synth", help="write synthetic binormal score files and a manifest")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--dataset", action="append", dest="datasets", metavar="ID",
                   help="dataset id; repeat for several datasets")
    p.add_argument("--target-auroc", action="append", type=_floats, metavar="A1,A2,...",
                   help="per-model target AUROCs; give once, or once per --dataset")
    p.add_argument("--models", help="comma-separated model ids (default m1..mN)")
    p.add_argument("--n-pos", type=int, default=1000)
    p.add_argument("--n-neg", type=int, default=1000)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--validation-target-auroc", type=_floats, metavar="A1,A2,...",
                   help="also write a shared validation split with these targets")

    p = sub.add_parser("fuse", help="write fused ensemble score files")
    _add_run_options(p)

    p = sub.add_parser("evaluate", help="AUROC/AUPRC for every model and ensemble")
    _add_run_options(p)
    p.add_argument("--curves", action="store_true", help="also write ROC/PR curve CSVs")

    p = sub.add_parser("rank", help="per-dataset ranks, rank shifts and never-worst set")
    _add_run_options(p, table_mode=True)

    p = sub.add_parser("report", help="markdown + JSON report with provenance")
    _add_run_options(p, table_mode=True)
    return parser


def _run(args):
    manifest = load_manifest(args.manifest)
    return run(
        manifest,
        strategy=args.strategy,
        weights=args.weights,
        join_policy=args.join_policy,
    )


def _table_and_provenance(args):
    """Metrics plus provenance, from raw scores or a published table."""
    if getattr(args, "metrics_table", None) is not None:
        text, digest = read_text(args.metrics_table)
        table = parse_metrics_table(text)
        return table, build_provenance({args.metrics_table.name: digest}), None
    result = _run(args)
    prov = build_provenance(result.digests, result.manifest.digest)
    return result.metrics, prov, result.fusion_info()


def cmd_validate(args) -> int:
    manifest = load_manifest(args.manifest)
    result = run(manifest, strategy="uniform", join_policy=args.join_policy, evaluate=False)
    for d, j in result.joins.items():
        p = j.panel
        n_pos = int(p.labels.sum())
        print(
            f"{d}: {p.n_models} models x {p.n_samples} samples "
            f"({n_pos} fake / {p.n_samples - n_pos} real), dropped {j.n_dropped}"
        )
    print("ok")
    return EXIT_OK


def cmd_synth(args) -> int:
    datasets = args.datasets or ["synthetic"]
    targets = args.target_auroc or [(0.9, 0.8, 0.7)]
    if len(targets) == 1:
        targets = targets * len(datasets)
    if len(targets) != len(datasets):
        raise ValidationError("give --target-auroc once, or once per --dataset")
    n_models = len(targets[0])
    if any(len(t) != n_models for t in targets):
        raise ValidationError("every --target-auroc list needs the same number of models")
    if n_models < 2:
        raise ValidationError("need at least 2 models")
    if args.validation_target_auroc is not None and "validation" in datasets:
        raise ValidationError("dataset id 'validation' is reserved for the validation split")
    models = tuple(args.models.split(",")) if args.models else ()

    specs = []
    for k, (d, t) in enumerate(zip(datasets, targets)):
        specs.append(SynthSpec(args.n_pos, args.n_neg, t, args.rho, args.seed + k, d, models))
    if args.validation_target_auroc is not None:
        specs.append(
            SynthSpec(args.n_pos, args.n_neg, args.validation_target_auroc, args.rho,
                      args.seed + len(datasets), "validation", models)
        )
    model_ids = list(specs[0].models)
    manifest: dict = {"models": model_ids, "datasets": []}
    for spec in specs:
        panel = generate_panel(spec)
        files = {}
        for m in panel.models:
            rel = f"{spec.dataset}/{m}.csv"
            _write(args.out_dir / rel, format_score_file(panel.records(m)))
            files[m] = rel
        if spec.dataset == "validation":
            manifest["validation"] = files
        else:
            manifest["datasets"].append({"id": spec.dataset, "scores": files})
    manifest["fusion"] = {"strategy": "both", "weights": "auroc"}
    if args.validation_target_auroc is None:
        manifest["fusion"]["strategy"] = "uniform"
    _write(args.out_dir / "synth_spec.json", canonical_json([s.to_dict() for s in specs]))
    _write(args.out_dir / "manifest.json", canonical_json(manifest))
    print(f"wrote {len(specs)} panel(s) x {len(model_ids)} models to {args.out_dir}")
    return EXIT_OK


def cmd_fuse(args) -> int:
    result = _run(args)
    members = set(result.manifest.models)
    for d, panel in result.panels.items():
        for m in panel.models:
            if m in members:
                continue
            if args.out_dir is not None:
                _write(args.out_dir / "fused" / d / f"{m}.csv", format_score_file(panel.records(m)))
            print(f"{d}: fused {m} over {panel.n_samples} samples")
    if args.out_dir is not None:
        _write(args.out_dir / "weights.json", canonical_json(result.fusion_info()))
    return EXIT_OK


def _print_table(table: MetricsTable) -> None:
    print("model,dataset,auroc,auprc")
    for d in table.datasets:
        for m in table.models:
            e = table.get(m, d)
            print(f"{m},{d},{e.auroc:.4f},{e.auprc:.4f}")


def cmd_evaluate(args) -> int:
    result = _run(args)
    _print_table(result.metrics)
    if args.out_dir is not None:
        _write(args.out_dir / "metrics.csv", format_metrics_table(result.metrics))
        if args.curves:
            for d, panel in result.panels.items():
                for m, row in zip(panel.models, panel.scores):
                    for kind in ("roc", "pr"):
                        curve = curve_points(panel.labels, row, kind)
                        _write(args.out_dir / "curves" / d / f"{m}.{kind}.csv",
                               format_curve_csv(curve, m, d))
    return EXIT_OK


def cmd_rank(args) -> int:
    table, prov, fusion = _table_and_provenance(args)
    bundle = build_bundle(table, prov, fusion)
    for d in table.datasets:
        for k in METRIC_KINDS:
            col = bundle.ranks.get(d, k)
            order = sorted(col, key=lambda m: (col[m], m))
            print(f"{d} {k}: " + ", ".join(f"{col[m]}={m}" for m in order))
    for k, shifts in bundle.shifts.items():
        for s in shifts:
            print(f"shift {k} {s.model}: {' -> '.join(map(str, s.ranks))} (max {s.max_shift})")
    print("never worst: " + ", ".join(sorted(bundle.robustness.never_worst)))
    if args.out_dir is not None:
        _write(args.out_dir / "ranks.csv", ranks_csv(bundle))
        _write(args.out_dir / "bump_chart.csv", bump_chart_csv(bundle))
        _write(args.out_dir / "robustness.json", robustness_json(bundle))
    return EXIT_OK


def cmd_report(args) -> int:
    table, prov, fusion = _table_and_provenance(args)
    bundle = build_bundle(table, prov, fusion)
    md = render_markdown(bundle)
    if args.out_dir is None:
        sys.stdout.write(md)
        return EXIT_OK
    _write(args.out_dir / "report.md", md)
    _write(args.out_dir / "report.json", render_json(bundle))
    _write(args.out_dir / "metrics.csv", format_metrics_table(table))
    _write(args.out_dir / "ranks.csv", ranks_csv(bundle))
    _write(args.out_dir / "bump_chart.csv", bump_chart_csv(bundle))
    _write(args.out_dir / "robustness.json", robustness_json(bundle))
    print(f"report written to {args.out_dir}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "synth": cmd_synth,
    "fuse": cmd_fuse,
    "evaluate": cmd_evaluate,
    "rank": cmd_rank,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"fuselab: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"fuselab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantViolation as exc:
        print(f"fuselab: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled error", exc_info=True)
        print(f"fuselab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
