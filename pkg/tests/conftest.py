import importlib
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from app.services.energy.constants import get_constants
from app.services.tower.config import TowerConfig

CONFIG_VARIABLES = (
    "LOG_LEVEL",
    "LOG_JSON",
    "APP_NAME",
    "APP_VERSION",
    "OUTPUT_DIR",
    "MANIFOLD_CATALOG",
    "QUAD_REL_TOL",
    "SWEEP_REL_TOL",
    "QUAD_MAX_PANELS",
    "FD_TOLERANCE",
    "WEYL_ZERO_THRESHOLD",
    "WEYL_NONZERO_THRESHOLD",
    "V_ENVELOPE_CONSTANT",
    "CUTOFF_RADIUS",
    "CUTOFF_PROFILE",
    "TOWER_THREADS",
)


@pytest.fixture(scope="session")
def consts7():
    return get_constants(7)


@pytest.fixture()
def tower_config():
    return TowerConfig(dim=7, k=2, d=[1.0, 1.0], eps=1e-4)


@pytest.fixture()
def output_dir(tmp_path):
    out = tmp_path / "reports"
    out.mkdir()
    return out


@pytest.fixture()
def clean_env(monkeypatch):
    """Environment without any toolkit variable; reload app.core.config to apply."""
    for name in CONFIG_VARIABLES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("dotenv.load_dotenv", lambda *args, **kwargs: False)
    yield monkeypatch

    import app.core.config as config

    monkeypatch.undo()
    importlib.reload(config)
