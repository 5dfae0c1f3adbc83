import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyclone.frontend import PACKAGE_LANGUAGE_DIR, load_language_config


@pytest.fixture(scope="session")
def java_cfg():
    return load_language_config(PACKAGE_LANGUAGE_DIR / "java.json")


@pytest.fixture(scope="session")
def python_cfg():
    return load_language_config(PACKAGE_LANGUAGE_DIR / "python.json")
