import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

DATA_DIR = Path(__file__).resolve().parent / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 验收规模的检查, 使用 -m \"not slow\" 跳过")


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
