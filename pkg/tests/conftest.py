import json
from pathlib import Path

import numpy as np
import pytest

from nhpump.config import DriveParams


@pytest.fixture
def temp_config_dir(tmp_path: Path) -> Path:
    """Create a temporary configs directory structure for tests."""
    configs_dir = tmp_path / "configs"
    configs_dir.mkdir()
    return configs_dir


@pytest.fixture
def presets_file(temp_config_dir: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """A small presets file in the project format, wired in through NHPUMP_PRESETS."""
    path = temp_config_dir / "presets_test.json"
    payload = {
        "presets": [
            {
                "key": "tiny_spectrum",
                "command": "spectrum",
                "description": "Coarse Bloch spectrum",
                "options": {"boundary": "pbc", "gamma": 0.3, "mu": 1.2, "n": 12},
            },
            {
                "key": "tiny_gbz",
                "command": "gbz",
                "options": {"gamma": 0.3, "mu": 0.8, "t": 0.4, "n_phi": 10},
            },
        ]
    }
    path.write_text(json.dumps(payload), encoding="utf-8")
    monkeypatch.setenv("NHPUMP_PRESETS", str(path))
    return path


@pytest.fixture
def hermitian() -> DriveParams:
    """Gapped Hermitian Rice-Mele pump with |C| = 1."""
    return DriveParams(mu=1.5, gamma=0.0)


@pytest.fixture
def nonreciprocal() -> DriveParams:
    """Gapped nonreciprocal chain with |mu| > |gamma| (real OBC spectrum)."""
    return DriveParams(mu=1.0, gamma=0.3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
