from pathlib import Path

import pytest

from toroid import RebaseConfig

REPO_ROOT = Path(__file__).resolve().parents[1]
SAMPLE_MARKET = REPO_ROOT / "data" / "sample_market.csv"
DEFAULT_CFG_FILE = REPO_ROOT / "data" / "default.cfg"


@pytest.fixture
def cfg() -> RebaseConfig:
    return RebaseConfig()


@pytest.fixture
def sample_market_path() -> Path:
    return SAMPLE_MARKET


@pytest.fixture
def default_cfg_path() -> Path:
    return DEFAULT_CFG_FILE
