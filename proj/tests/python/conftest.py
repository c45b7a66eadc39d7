import os
import pathlib

import pytest


@pytest.fixture
def cli():
    path = os.environ.get("HDLSD_CLI")
    if not path:
        pytest.skip("HDLSD_CLI not set")
    return path


@pytest.fixture
def configs():
    return pathlib.Path(os.environ.get("HDLSD_CONFIGS", pathlib.Path(__file__).resolve().parents[2] / "configs"))
