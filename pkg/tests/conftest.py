import gzip
import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from solnl.astree import parse_ast

# every property runs at least this many cases
FUZZ_CASES = 1000

settings.register_profile(
    "solnl", max_examples=FUZZ_CASES, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("solnl")

DATA = Path(__file__).parent / "data"


def read_data(name: str) -> str:
    path = DATA / name
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8").read()
    return path.read_text(encoding="utf-8")


def fixture_tree(name: str):
    """AstTree of one of the small compiled contracts in fixtures.json."""
    fx = json.loads(read_data("fixtures.json"))[name]
    return parse_ast(json.dumps(fx["ast"]), fx["source"].encode())


@pytest.fixture(scope="session")
def fixtures():
    return json.loads(read_data("fixtures.json"))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
