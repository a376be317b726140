from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def table1_path() -> Path:
    return REPO_ROOT / "data" / "oecd_table1.csv"
