import sys
from pathlib import Path

import pytest

from cstndc import formats

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def running_example():
    return formats.parse_cstn((DATA / "running_example.cstn").read_text(), source="running_example.cstn")


@pytest.fixture(scope="session")
def reference_strategy(running_example):
    return formats.parse_strategy((DATA / "reference_strategy.json").read_text(), running_example)
