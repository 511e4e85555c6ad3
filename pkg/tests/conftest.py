from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from fuselab.core import ScorePanel

FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

_acceptance: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _acceptance.append((status, marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for status, name in _acceptance:
        terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture
def published_path() -> Path:
    return FIXTURES / "published_results.csv"


def make_panel(scores, labels, dataset="d", models=None, sample_ids=None) -> ScorePanel:
    scores = np.asarray(scores, dtype=float)
    if models is None:
        models = [f"m{i}" for i in range(scores.shape[0])]
    if sample_ids is None:
        sample_ids = [f"s{j:04d}" for j in range(scores.shape[1])]
    return ScorePanel(dataset, tuple(models), tuple(sample_ids), np.asarray(labels), scores)


def random_panel(rng: np.random.Generator, n_models=None, n_samples=None) -> ScorePanel:
    n_models = n_models or int(rng.integers(2, 9))
    n_samples = n_samples or int(rng.integers(2, 60))
    labels = rng.integers(0, 2, n_samples)
    labels[0], labels[1] = 1, 0
    scores = rng.random((n_models, n_samples))
    # sprinkle exact 0/1 and shared values
    scores[rng.random(scores.shape) < 0.05] = 0.0
    scores[rng.random(scores.shape) < 0.05] = 1.0
    return make_panel(scores, labels)
