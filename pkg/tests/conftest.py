import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from otds.group import get_group  # noqa: E402


@pytest.fixture
def toy():
    return get_group("toy")


@pytest.fixture
def prod():
    return get_group("production")


@pytest.fixture(params=["toy", "production"])
def group(request):
    return get_group(request.param)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, note in sorted(mod.RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{number}] {title} {note}")
