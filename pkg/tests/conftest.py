import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    # keine Tests gegen die echte hkmod_settings.json
    monkeypatch.setenv("HKMOD_SETTINGS", str(tmp_path / "hkmod_settings.json"))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
