import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relatekit.dataset import load_dataset
from relatekit.fixture import FixtureSpec, generate_fixture


@pytest.fixture(scope="session")
def fx_dir(tmp_path_factory) -> Path:
    """The default synthetic fixture, generated once per session."""
    out = tmp_path_factory.mktemp("fixture")
    generate_fixture(FixtureSpec(seed=7), out)
    return out


@pytest.fixture(scope="session")
def fx_manifest(fx_dir) -> dict:
    import json

    return json.loads((fx_dir / "manifest.json").read_text())


@pytest.fixture(scope="session")
def fx_dataset(fx_dir):
    return load_dataset(fx_dir / "dataset")


@pytest.fixture(scope="session")
def small_fx_dir(tmp_path_factory) -> Path:
    """A much smaller fixture for fast end-to-end pipeline tests."""
    out = tmp_path_factory.mktemp("small_fixture")
    generate_fixture(
        FixtureSpec(seed=11, train_captions=40, test_captions=24, listeners=30), out
    )
    return out
