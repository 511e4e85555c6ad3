"""The bundled end-to-end fixture: synth -> fuse -> evaluate -> rank -> report."""

from __future__ import annotations

from pathlib import Path

from fuselab.cli import main

MODELS = "mesoinception,xception,core,ffd,srm,ucf"
SYNTH_ARGS = [
    "synth",
    "--models", MODELS,
    "--dataset", "uadfv-like", "--target-auroc", "0.82,0.93,0.96,0.95,0.88,0.92",
    "--dataset", "celeb-like", "--target-auroc", "0.65,0.74,0.74,0.69,0.76,0.77",
    "--validation-target-auroc", "0.80,0.90,0.92,0.91,0.85,0.89",
    "--n-pos", "300", "--n-neg", "200", "--rho", "0.3", "--seed", "2025",
]
REPORT_FILES = ("report.json", "report.md", "bump_chart.csv", "robustness.json", "ranks.csv", "metrics.csv")


def run_e2e(root: Path) -> Path:
    """Run every stage through the CLI under ``root``; return the report dir."""
    data = root / "data"
    manifest = str(data / "manifest.json")
    steps = [
        SYNTH_ARGS + ["--out-dir", str(data)],
        ["validate", "--manifest", manifest],
        ["fuse", "--manifest", manifest, "--out-dir", str(root / "fused")],
        ["evaluate", "--manifest", manifest, "--out-dir", str(root / "eval"), "--curves"],
        ["rank", "--manifest", manifest, "--out-dir", str(root / "rank")],
        ["report", "--manifest", manifest, "--out-dir", str(root / "report")],
    ]
    for argv in steps:
        code = main(argv)
        if code != 0:
            raise RuntimeError(f"fuselab {' '.join(argv)} exited {code}")
    return root / "report"
