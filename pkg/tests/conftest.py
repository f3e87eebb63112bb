import functools
import os

import pytest
from hypothesis import HealthCheck, settings

from nilpadic.examples import EXAMPLES, example, random_corpus

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPEC_DIR = os.path.join(ROOT, "specs")


@functools.lru_cache(maxsize=None)
def corpus(count=40, seed=7):
    return tuple(random_corpus(count, seed=seed))


@pytest.fixture(params=sorted(EXAMPLES))
def example_spec(request):
    return example(request.param)


@pytest.fixture
def spec_dir():
    return SPEC_DIR


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, whatever the capture mode."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and rep.when == "call":
                name = nodeid.split("::")[-1]
                num = int(name.split("_")[2])
                rows.append((num, "PASS" if outcome == "passed" else "FAIL", name))
    if rows:
        terminalreporter.section("acceptance criteria")
        for num, verdict, name in sorted(rows):
            terminalreporter.write_line(f"criterion {num}: {verdict}  ({name})")
