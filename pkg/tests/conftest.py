from __future__ import annotations

import pytest

from mindsim.keyboard import default_layout
from mindsim.profiles import bundled_profile_path, load_profile


@pytest.fixture(scope="session")
def keyboard_tree():
    return default_layout()


@pytest.fixture(scope="session")
def profile():
    return load_profile(bundled_profile_path())
