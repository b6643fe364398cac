import json
import pathlib

import pytest
from hypothesis import settings

settings.register_profile("fg", max_examples=40, deadline=None)
settings.load_profile("fg")

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(1.0, abs(complex(b)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
