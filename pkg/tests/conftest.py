import pytest

from corpuslab import make_balanced_buildings, tagworded_corpus
from tweetlab.records import Corpus


@pytest.fixture
def balanced_corpus() -> Corpus:
    return tagworded_corpus(make_balanced_buildings(20, n_langs=2))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(rep, "when", "call") == "call":
                lines.append((nodeid.split("::")[-1], outcome.upper()))
            elif "test_acceptance.py" in nodeid and outcome == "skipped":
                lines.append((nodeid.split("::")[-1], "SKIPPED"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in sorted(set(lines)):
            terminalreporter.write_line(f"{outcome:8s} {name}")
