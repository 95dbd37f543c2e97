"""Shared fixtures and the per-criterion acceptance summary."""

from collections import defaultdict

import pytest

from pashto_textclf.harness.synth import (
    generate_synthetic_corpus, multi_label_spec, single_label_spec,
)

CRITERIA = {
    1: "metrics oracle suite",
    2: "feature oracle suite",
    3: "MLP gradient check",
    4: "classifier sanity battery",
    5: "synthetic end-to-end, single-label",
    6: "synthetic end-to-end, multi-label",
    7: "bigram never beats unigram by more than 0.02",
    8: "determinism of tables, charts and manifests",
    9: "round-trips and vocabulary hash check",
    10: "report formats",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]


def pytest_runtest_logreport(report):
    criterion = getattr(report, "criterion", None)
    if criterion is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[criterion].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {status:<7} {CRITERIA[n]}")


@pytest.fixture(scope="session")
def single_synth():
    """8 classes x 100 documents, noise rate 0.3, seed 42."""
    return generate_synthetic_corpus(single_label_spec(8, 100, noise_rate=0.3, seed=42))


@pytest.fixture(scope="session")
def multi_synth():
    """9 labels in the reference proportions, 2.5 labels per document on average, seed 42."""
    return generate_synthetic_corpus(multi_label_spec(noise_rate=0.3, seed=42))


@pytest.fixture(scope="session")
def small_single_synth():
    return generate_synthetic_corpus(single_label_spec(4, 20, noise_rate=0.3, seed=3,
                                                       keywords_per_label=8,
                                                       noise_vocabulary=30,
                                                       min_length=10, max_length=20))


@pytest.fixture(scope="session")
def small_multi_synth():
    return generate_synthetic_corpus(multi_label_spec(150, noise_rate=0.3, seed=5,
                                                      keywords_per_label=8,
                                                      noise_vocabulary=30,
                                                      min_length=10, max_length=20))
